#ifndef SPECINV_COMMANDS_HPP
#define SPECINV_COMMANDS_HPP

#include <filesystem>

#include "specinv/config.hpp"

namespace specinv {

/// Batch pipeline stages behind the CLI subcommands. Every command is
/// deterministic: identical config and inputs give byte-identical outputs.

/// Writes per-h spectrum CSVs plus a manifest under out/spectra/.
int cmd_forward(const RunConfig& cfg, const std::filesystem::path& out);

/// Quadrature-oracle curves: A/B on the lambda grid under out/oracle/, plus
/// level-set invariants and volume on the s grid.
int cmd_oracle(const RunConfig& cfg, const std::filesystem::path& out);

/// Trace-invariant extraction from a spectra directory (manifest required)
/// to out/curves/invariants.csv.
int cmd_extract(const RunConfig& cfg, const std::filesystem::path& spectra_dir,
                const std::filesystem::path& out);

/// Abel inversion of the extracted (or oracle) curves to volume/I1/I2 under
/// out/inversion/.
int cmd_invert(const RunConfig& cfg, const std::filesystem::path& out);

/// Profile recovery, defect and gradient-profile curves, report JSON,
/// profile CSV, and SVG plots under out/reconstruction/.
int cmd_reconstruct(const RunConfig& cfg, const std::filesystem::path& out);

/// Radiality diagnostics from the quadrature oracles: defect curve,
/// pushforward density with atom flags, and a verdict JSON.
int cmd_diagnose(const RunConfig& cfg, const std::filesystem::path& out);

/// Gradient flowlines: trajectory CSVs and the certificate JSON.
int cmd_flowlines(const RunConfig& cfg, const std::filesystem::path& out);

} // namespace specinv

#endif
