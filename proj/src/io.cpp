#include "qcae/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qcae {

namespace {

using nlohmann::json;

json eval_mode_to_json(const EvalMode& mode) {
  if (mode.is_analytic()) return json{{"kind", "analytic"}};
  return json{{"kind", "shots"}, {"shots", mode.shots}, {"seed", mode.seed}};
}

EvalMode eval_mode_from_json(const json& doc) {
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "analytic") return EvalMode::analytic();
  if (kind == "shots") {
    return EvalMode::sampled(doc.at("shots").get<long>(),
                             doc.at("seed").get<std::uint64_t>());
  }
  throw std::invalid_argument("unknown eval mode '" + kind + "'");
}

json config_to_json(const TrainConfig& config) {
  return json{{"variant", std::string(variant_name(config.variant))},
              {"layers", config.layers},
              {"steps", config.steps},
              {"batch_size", config.batch_size},
              {"learning_rate", config.learning_rate},
              {"snr_db", config.snr_db},
              {"eval_mode", eval_mode_to_json(config.eval_mode)},
              {"seed", config.seed},
              {"ser_every", config.ser_every},
              {"ser_symbols", config.ser_symbols}};
}

TrainConfig config_from_json(const json& doc) {
  TrainConfig config;
  config.variant = variant_from_name(doc.at("variant").get<std::string>());
  config.layers = doc.at("layers").get<int>();
  config.steps = doc.at("steps").get<int>();
  config.batch_size = doc.at("batch_size").get<int>();
  config.learning_rate = doc.at("learning_rate").get<double>();
  config.snr_db = doc.at("snr_db").get<double>();
  config.eval_mode = eval_mode_from_json(doc.at("eval_mode"));
  config.seed = doc.at("seed").get<std::uint64_t>();
  config.ser_every = doc.at("ser_every").get<int>();
  config.ser_symbols = doc.at("ser_symbols").get<long>();
  return config;
}

std::string fmt(double value, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);  // '\n' endings everywhere
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

void write_comments(std::ofstream& out,
                    const std::vector<std::string>& comments) {
  for (const auto& line : comments) out << "# " << line << "\n";
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json doc;
  doc["format"] = "qcae-checkpoint-v1";
  doc["version"] = std::string(kVersion);
  doc["config"] = config_to_json(ckpt.config);
  doc["completed_steps"] = ckpt.completed_steps;
  doc["variant"] = std::string(variant_name(ckpt.model.variant));
  doc["layers"] = ckpt.model.params.layers;
  std::vector<double> raw(ckpt.model.table.raw_flat().begin(),
                          ckpt.model.table.raw_flat().end());
  doc["raw_embedding"] = raw;
  doc["rotations"] = ckpt.model.params.rotations;
  if (ckpt.model.params.has_weights()) {
    doc["encoding_weights"] = ckpt.model.params.encoding_weights;
  }
  doc["adam"] = json{{"steps", ckpt.adam.steps},
                     {"m", ckpt.adam.m},
                     {"v", ckpt.adam.v},
                     {"learning_rate", ckpt.adam.config.learning_rate},
                     {"beta1", ckpt.adam.config.beta1},
                     {"beta2", ckpt.adam.config.beta2},
                     {"epsilon", ckpt.adam.config.epsilon}};
  return doc.dump(2);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("format").get<std::string>() != "qcae-checkpoint-v1") {
    throw std::invalid_argument("unrecognized checkpoint format");
  }
  Checkpoint ckpt;
  ckpt.config = config_from_json(doc.at("config"));
  ckpt.completed_steps = doc.at("completed_steps").get<int>();
  ckpt.model.variant = variant_from_name(doc.at("variant").get<std::string>());
  ckpt.model.params.layers = doc.at("layers").get<int>();
  const auto raw = doc.at("raw_embedding").get<std::vector<double>>();
  if (raw.size() != 32) throw std::invalid_argument("bad embedding shape");
  std::copy(raw.begin(), raw.end(), ckpt.model.table.raw_flat().begin());
  ckpt.model.params.rotations = doc.at("rotations").get<std::vector<double>>();
  if (doc.contains("encoding_weights")) {
    ckpt.model.params.encoding_weights =
        doc.at("encoding_weights").get<std::vector<double>>();
  }
  ckpt.model.params.validate(ckpt.model.variant);
  const auto& adam = doc.at("adam");
  ckpt.adam.steps = adam.at("steps").get<long long>();
  ckpt.adam.m = adam.at("m").get<std::vector<double>>();
  ckpt.adam.v = adam.at("v").get<std::vector<double>>();
  ckpt.adam.config.learning_rate = adam.at("learning_rate").get<double>();
  ckpt.adam.config.beta1 = adam.at("beta1").get<double>();
  ckpt.adam.config.beta2 = adam.at("beta2").get<double>();
  ckpt.adam.config.epsilon = adam.at("epsilon").get<double>();
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& ckpt) {
  auto out = open_for_write(path);
  out << checkpoint_to_json(ckpt) << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str());
}

std::string config_to_string(const TrainConfig& config) {
  std::ostringstream out;
  out << "variant=" << variant_name(config.variant)
      << " layers=" << config.layers << " steps=" << config.steps
      << " batch_size=" << config.batch_size
      << " learning_rate=" << fmt(config.learning_rate, "%g")
      << " snr_db=" << fmt(config.snr_db, "%g") << " eval_mode="
      << (config.eval_mode.is_analytic()
              ? std::string("analytic")
              : "shots:" + std::to_string(config.eval_mode.shots) + ":" +
                    std::to_string(config.eval_mode.seed))
      << " seed=" << config.seed << " ser_every=" << config.ser_every
      << " ser_symbols=" << config.ser_symbols;
  return out.str();
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const MetricsHistory& metrics,
                       const std::vector<std::string>& comments) {
  auto out = open_for_write(path);
  write_comments(out, comments);
  out << "step,loss,ser\n";
  // SER evaluations land on the row of the matching completed-update count;
  // row `step` reports the loss of update step+1.
  std::size_t eval = 0;
  if (eval < metrics.ser_steps.size() && metrics.ser_steps[eval] == 0) {
    out << "0,," << fmt(metrics.ser[eval], "%.6g") << "\n";
    ++eval;
  }
  for (std::size_t i = 0; i < metrics.loss.size(); ++i) {
    out << (i + 1) << "," << fmt(metrics.loss[i], "%.10g") << ",";
    if (eval < metrics.ser_steps.size() &&
        metrics.ser_steps[eval] == static_cast<int>(i + 1)) {
      out << fmt(metrics.ser[eval], "%.6g");
      ++eval;
    }
    out << "\n";
  }
}

void write_timings_csv(const std::filesystem::path& path,
                       const MetricsHistory& metrics,
                       const std::vector<std::string>& comments) {
  auto out = open_for_write(path);
  write_comments(out, comments);
  out << "step,wall_ms\n";
  for (std::size_t i = 0; i < metrics.wall_ms.size(); ++i) {
    out << (i + 1) << "," << fmt(metrics.wall_ms[i], "%.3f") << "\n";
  }
}

void write_constellation_csv(const std::filesystem::path& path,
                             const ConstellationExport& exported,
                             const std::vector<std::string>& comments) {
  auto out = open_for_write(path);
  write_comments(out, comments);
  out << "# min_distance=" << fmt(exported.min_distance, "%.10g")
      << " average_power=" << fmt(exported.average_power, "%.12g") << "\n";
  out << "message,i,q\n";
  for (const auto& p : exported.points) {
    out << p.message << "," << fmt(p.i, "%.10g") << "," << fmt(p.q, "%.10g")
        << "\n";
  }
}

void write_snr_sweep_csv(const std::filesystem::path& path,
                         const std::vector<SnrPoint>& hybrid,
                         const std::optional<std::vector<SnrPoint>>& baseline,
                         const std::vector<std::string>& comments) {
  if (baseline && baseline->size() != hybrid.size()) {
    throw std::invalid_argument("baseline sweep must match hybrid grid");
  }
  auto out = open_for_write(path);
  write_comments(out, comments);
  out << "snr_db,ser" << (baseline ? ",baseline_ser" : "") << "\n";
  for (std::size_t i = 0; i < hybrid.size(); ++i) {
    out << fmt(hybrid[i].snr_db, "%g") << "," << fmt(hybrid[i].ser, "%.6g");
    if (baseline) out << "," << fmt((*baseline)[i].ser, "%.6g");
    out << "\n";
  }
}

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<ReportRow>& rows,
                      const std::vector<std::string>& comments) {
  auto out = open_for_write(path);
  write_comments(out, comments);
  out << "device,layers,depth,time_us\n";
  for (const auto& row : rows) {
    out << row.device << "," << row.layers << "," << row.depth << ","
        << fmt(row.time_us, "%.4f") << "\n";
  }
}

}  // namespace qcae
