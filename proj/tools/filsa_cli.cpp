// Copyright 2026 The filsa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Experiment runner. Links only the C interface of libfilsa.

#include "filsa/filsa.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitIo = 4;

int exit_code_for(int status) {
    switch (status) {
        case FILSA_OK: return kExitOk;
        case FILSA_E_CONFIG_INVALID: return kExitConfig;
        case FILSA_E_DIVERGED_ITERATE: return kExitDiverged;
        case FILSA_E_IO_FAILURE: return kExitIo;
        default: return kExitOther;
    }
}

struct ConfigDeleter {
    void operator()(filsa_config* c) const { filsa_config_free(c); }
};
struct StringDeleter {
    void operator()(char* s) const { filsa_string_free(s); }
};
using ConfigPtr = std::unique_ptr<filsa_config, ConfigDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int report(int status) {
    if (status != FILSA_OK)
        std::fprintf(stderr, "filsa: %s\n", filsa_last_error());
    return exit_code_for(status);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
            throw CLI::ValidationError("--seeds", "expected comma-separated non-negative integers");
        seeds.push_back(std::stoull(item));
    }
    if (seeds.empty()) throw CLI::ValidationError("--seeds", "expected at least one seed");
    return seeds;
}

struct Common {
    std::string config;
    std::string out;
    std::string seeds;
    bool quiet = false;
};

void add_common(CLI::App* sub, Common& common, bool with_seeds) {
    sub->add_option("--config", common.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (overrides the config)");
    if (with_seeds) sub->add_option("--seeds", common.seeds, "comma-separated seeds (override the config)");
    sub->add_flag("--quiet", common.quiet, "print nothing on success");
}

int load(const Common& common, ConfigPtr& config) {
    filsa_config* raw = nullptr;
    const int status = filsa_config_load(common.config.c_str(), &raw);
    config.reset(raw);
    if (status != FILSA_OK) return status;
    if (!common.out.empty()) {
        const int s = filsa_config_set_output_dir(config.get(), common.out.c_str());
        if (s != FILSA_OK) return s;
    }
    if (!common.seeds.empty()) {
        const auto seeds = parse_seed_list(common.seeds);
        return filsa_config_set_seeds(config.get(), seeds.data(), seeds.size());
    }
    return FILSA_OK;
}

std::string output_dir(const filsa_config* config) {
    char* raw = nullptr;
    if (filsa_config_output_dir(config, &raw) != FILSA_OK) return "?";
    StringPtr dir(raw);
    return dir.get();
}

int run_pipeline(const Common& common, bool study) {
    ConfigPtr config;
    int status = load(common, config);
    if (status != FILSA_OK) return report(status);
    int diverged = 0;
    char* raw = nullptr;
    status = study ? filsa_run_noise_study(config.get(), &diverged, &raw)
                   : filsa_run_experiment(config.get(), &diverged, &raw);
    StringPtr summary(raw);
    if (status != FILSA_OK) return report(status);
    if (!common.quiet)
        std::printf("%s written to %s%s\n", study ? "study" : "experiment", output_dir(config.get()).c_str(),
                    diverged ? " (some seeds diverged)" : "");
    return diverged ? kExitDiverged : kExitOk;
}

int run_integrate(const Common& common) {
    ConfigPtr config;
    int status = load(common, config);
    if (status != FILSA_OK) return report(status);
    status = filsa_run_integrate(config.get(), nullptr);
    if (status != FILSA_OK) return report(status);
    if (!common.quiet) std::printf("trajectory written to %s\n", output_dir(config.get()).c_str());
    return kExitOk;
}

int run_maps(const Common& common) {
    ConfigPtr config;
    int status = load(common, config);
    if (status != FILSA_OK) return report(status);
    char* raw = nullptr;
    status = filsa_maps_json(config.get(), &raw);
    StringPtr text(raw);
    if (status != FILSA_OK) return report(status);
    if (!common.quiet) std::printf("%s\n", text.get());
    return kExitOk;
}

int run_measures(const Common& common, const std::vector<std::string>& traces) {
    ConfigPtr config;
    int status = load(common, config);
    if (status != FILSA_OK) return report(status);
    std::vector<const char*> paths;
    for (const auto& t : traces) paths.push_back(t.c_str());
    status = filsa_recompute_measures(config.get(), paths.data(), paths.size());
    if (status != FILSA_OK) return report(status);
    if (!common.quiet) std::printf("measures written to %s\n", output_dir(config.get()).c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic approximation with discontinuous dynamics: simulation and diagnostics"};
    app.require_subcommand(1);

    Common simulate_opts;
    Common integrate_opts;
    Common maps_opts;
    Common measures_opts;
    Common study_opts;
    std::vector<std::string> traces;

    auto* simulate = app.add_subcommand("simulate", "run the iteration for every seed and write reports");
    add_common(simulate, simulate_opts, true);
    auto* integrate = app.add_subcommand("integrate", "integrate the Filippov inclusion from x0");
    add_common(integrate, integrate_opts, false);
    auto* maps = app.add_subcommand("maps", "print Filippov and Krasovskii hulls at the query points");
    add_common(maps, maps_opts, false);
    auto* measures = app.add_subcommand("measures", "recompute diagnostics from trace CSV files");
    add_common(measures, measures_opts, false);
    measures->add_option("--trace", traces, "trace CSV file(s)")->required()->check(CLI::ExistingFile);
    auto* study = app.add_subcommand("study", "compare gaussian, rademacher and zero noise");
    add_common(study, study_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) return run_pipeline(simulate_opts, false);
        if (study->parsed()) return run_pipeline(study_opts, true);
        if (integrate->parsed()) return run_integrate(integrate_opts);
        if (maps->parsed()) return run_maps(maps_opts);
        if (measures->parsed()) return run_measures(measures_opts, traces);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "filsa: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOther;
}
