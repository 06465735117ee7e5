// Walks the improvement ledger one cumulative upgrade at a time and prints
// the projected coupling, cooperativities, and peak conversion efficiency.

#include <cstdio>
#include <string>
#include <vector>

#include "trires/design.hpp"
#include "trires/io.hpp"

using namespace trires;

int main(int argc, char** argv) {
    const ConfigDocument doc = parse_config(resolve_config_path("quartz_experiment"));
    const std::string path = argc > 1 ? argv[1] : default_ledger_path(doc);
    const ImprovementLedger led = ImprovementLedger::from_file(path);

    std::printf("%-24s %14s %12s %12s %12s\n", "cumulative upgrade", "g_em/2pi [Hz]", "C_em",
                "C_om", "peak eta");
    const Projection base = project(led, {}, false);
    std::printf("%-24s %14.4g %12.4g %12.4g %12.4g\n", "(baseline)",
                base.g_em / consts::two_pi, base.C_em, base.C_om, base.eta);

    std::vector<std::string> selection;
    for (const auto& e : led.entries) {
        selection.push_back(e.label);
        const Projection step = project(led, selection, true);
        std::printf("%-24s %14.4g %12.4g %12.4g %12.4g\n", e.label.c_str(),
                    step.g_em / consts::two_pi, step.C_em, step.C_om, step.eta);
    }
    return 0;
}
