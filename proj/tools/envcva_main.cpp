#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "envcva/error.hpp"
#include "envcva/pipeline.hpp"
#include "json.hpp"

namespace {

int report_error(const std::string& kind, const std::string& message, int code) {
    nlohmann::ordered_json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << j.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    using namespace envcva;

    CLI::App app{"Climate and nature CVA engine"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ENVCVA_VERSION));

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    bool export_exposures = false;

    const char* commands[][2] = {
        {"climate", "Scenario CVA with robust WWR add-ons"},
        {"nature", "Nature-risk NCVA distributions across tail paths"},
        {"case-study", "Two-stage physical transmission per ensemble member"},
        {"commodity", "WTI swap corners decomposition and epsilon sweep"},
        {"calibrate-eps", "Calibrate the KL radius to a stressed dependence target"},
        {"wwr-sweep", "Robust WWR across a grid of KL radii"},
    };
    for (auto& c : commands) {
        auto* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "Output directory")->required();
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_flag("--export-exposures", export_exposures, "Also write the pathwise exposure cube");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("validation", e.what(), 2);
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const auto cfg = pipeline::load_config(config_path);
        const auto outcome = pipeline::run(pipeline::parse_command(name), cfg, {out_dir, seed, export_exposures});
        for (const auto& f : outcome.files) std::cout << f << '\n';
        return 0;
    } catch (const Error& e) {
        return report_error(e.kind_name(), e.what(), e.exit_code());
    } catch (const std::exception& e) {
        return report_error("numeric", e.what(), 4);
    }
}
