#pragma once

#include "hawkes/config.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/model.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hawkes {

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

/// Exit codes shared by every subcommand.
namespace exit_codes {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int assumption_fail = 2;
inline constexpr int assumption_unknown = 3;
inline constexpr int domination = 4;
}  // namespace exit_codes

/// One documented config key.
struct ConfigKey {
    std::string section;
    std::string key;
    std::string fallback;  ///< empty when the key is required
    std::string precondition;
};

/// Every key understood by the subcommands.
const std::vector<ConfigKey>& config_keys();

/// Human-readable listing of config_keys(), grouped by section.
std::string config_reference();

/// `[model]` block.
ModelSpec model_from_config(const ConfigSection& s);

/// `[kernel]` or `[kernels.<name>]` block; tabulated files resolve against `base_dir`.
Kernel kernel_from_config(const ConfigSection& s, const std::string& base_dir);

/// Each command validates the whole config before computing, writes only under the output
/// directory and returns an exit code; module errors propagate as exceptions.
int cmd_fit(const Config& cfg, const Overrides& ov, std::ostream& log);
int cmd_simulate(const Config& cfg, const Overrides& ov, std::ostream& log);
int cmd_check(const Config& cfg, const Overrides& ov, std::ostream& log);
int cmd_converge(const Config& cfg, const Overrides& ov, std::ostream& log);
int cmd_portfolio(const Config& cfg, const Overrides& ov, std::ostream& log);

}  // namespace hawkes
