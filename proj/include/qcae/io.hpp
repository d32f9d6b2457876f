#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcae/comm.hpp"
#include "qcae/transpile.hpp"

namespace qcae {

inline constexpr std::string_view kVersion = "0.1.0";

// Full training state: enough to resume or evaluate a run.
struct Checkpoint {
  TrainedModel model;
  AdamState adam;
  TrainConfig config;
  int completed_steps = 0;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Canonical key=value rendering of a config, used for provenance headers and
// hashing. Stable field order.
std::string config_to_string(const TrainConfig& config);
std::uint64_t fnv1a64(std::string_view text);

// CSV emission. Every writer prints the given comment lines first, each
// prefixed with "# ". Comma-separated, UTF-8.
void write_metrics_csv(const std::filesystem::path& path,
                       const MetricsHistory& metrics,
                       const std::vector<std::string>& comments);
// Wall-clock timings live in a separate file so metrics CSVs stay bitwise
// reproducible for a fixed (config, seed).
void write_timings_csv(const std::filesystem::path& path,
                       const MetricsHistory& metrics,
                       const std::vector<std::string>& comments);
void write_constellation_csv(const std::filesystem::path& path,
                             const ConstellationExport& exported,
                             const std::vector<std::string>& comments);
void write_snr_sweep_csv(const std::filesystem::path& path,
                         const std::vector<SnrPoint>& hybrid,
                         const std::optional<std::vector<SnrPoint>>& baseline,
                         const std::vector<std::string>& comments);
void write_report_csv(const std::filesystem::path& path,
                      const std::vector<ReportRow>& rows,
                      const std::vector<std::string>& comments);

}  // namespace qcae
