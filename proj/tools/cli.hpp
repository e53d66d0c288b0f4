#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "alselect/simulator.hpp"
#include "alselect/strategies.hpp"

namespace alselect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitRuntime = 3;

/// A parsed run config: the shared experiment settings plus the strategies and
/// seeds to sweep.
struct RunPlan {
  ExperimentConfig base;
  std::vector<StrategyConfig> strategies;
  std::vector<std::uint64_t> seeds;
  bool traces = false;
};

/// Parses the JSON config document; relative paths resolve against base_dir.
/// `default_seed` applies when the document has no "seed".
RunPlan parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                         std::uint64_t default_seed = 0);

/// Canonical JSON of the whole plan (sorted keys).
std::string plan_json(const RunPlan& plan);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> rounds;
  std::optional<std::size_t> n;
  std::size_t jobs = 1;
  bool traces = false;
};

/// Default seed: ALSELECT_SEED if set and numeric, otherwise 0.
std::uint64_t env_default_seed();

DatasetFormat infer_format(const std::filesystem::path& path);

int cmd_gen_stub_scores(const std::filesystem::path& dataset, std::optional<DatasetFormat> format,
                        const std::filesystem::path& out, std::size_t dim, std::uint64_t seed,
                        std::ostream& err);

int cmd_validate_scores(const std::filesystem::path& dataset, std::optional<DatasetFormat> format,
                        const std::filesystem::path& scores, std::ostream& out, std::ostream& err);

int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out_dir,
            const RunOverrides& overrides, std::ostream& out, std::ostream& err);

/// Writes a synthetic two-class corpus as TSV.
int cmd_gen_synthetic(const std::filesystem::path& out, std::size_t pairs, std::uint64_t seed,
                      std::ostream& err);

/// Full argv entry point.
int run_cli(int argc, char** argv);

}  // namespace alselect::cli
