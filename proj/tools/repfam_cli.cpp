// repfam: batch driver for scenario files.
//
//   repfam run <scenario> [-o report.json]
//   repfam dump-spectrum <scenario> <query-id> <out.csv>
//   repfam gallery list
//
// Exit codes: 0 ok, 2 parse, 3 unsupported model, 4 incompatible query,
// 5 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "repfam/scenario.hpp"

namespace sc = repfam::scenario;

namespace {

int run(const std::string& path, const std::string& out) {
    const auto text = sc::render(sc::run_scenario(path));
    if (out.empty() || out == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text)) throw repfam::IoError("cannot write '" + out + "'");
    return 0;
}

int dump(const std::string& path, const std::string& id, const std::string& out) {
    const auto s = sc::Scenario::from_file(path);
    sc::emit_spectrum_dump(sc::query_spectrum(s, id), out);
    return 0;
}

int gallery_list() {
    std::cout << "models:\n";
    for (const auto& g : sc::model_gallery())
        std::cout << "  " << g.name << "  [" << g.parameters << "]  " << g.summary << "\n";
    std::cout << "families:\n";
    for (const auto& g : sc::family_generators())
        std::cout << "  " << g.name << (g.parameters.empty() ? "" : "  [" + g.parameters + "]") << "  " << g.summary
                  << "\n";
    std::cout << "queries:\n";
    for (const auto& k : sc::query_kinds()) std::cout << "  " << k << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Representation-family checks for operator-algebra models"};
    app.set_version_flag("--version", std::string("repfam ") + sc::kVersion);
    app.require_subcommand(1);

    std::string scenario, out, query_id, csv;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and print its JSON report");
    run_cmd->add_option("scenario", scenario, "Scenario file")->required();
    run_cmd->add_option("-o,--output", out, "Write the report here instead of stdout");

    auto* dump_cmd = app.add_subcommand("dump-spectrum", "Write the spectrum of one query as CSV");
    dump_cmd->add_option("scenario", scenario, "Scenario file")->required();
    dump_cmd->add_option("query-id", query_id, "Id of a spectrum-valued query")->required();
    dump_cmd->add_option("out", csv, "Output CSV path")->required();

    auto* gallery_cmd = app.add_subcommand("gallery", "Inspect the built-in gallery");
    gallery_cmd->add_subcommand("list", "List models, family generators and query kinds");
    gallery_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) return run(scenario, out);
        if (*dump_cmd) return dump(scenario, query_id, csv);
        return gallery_list();
    } catch (const repfam::Error& e) {
        std::cerr << "repfam: " << e.what() << "\n";
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "repfam: " << e.what() << "\n";
        return 5;
    }
}
