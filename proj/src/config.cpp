#include "tab/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "tab/error.hpp"

namespace tab {

using nlohmann::json;

namespace {

void reject_unknown(const json& doc, const char* where, std::initializer_list<const char*> keys) {
  if (!doc.is_object()) throw InvalidParameter(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw InvalidParameter("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

json files_json(const std::vector<ReportFile>& files) {
  json out = json::array();
  for (const auto& f : files) out.push_back({{"path", f.path}, {"rows", f.rows}});
  return out;
}

json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"p95", s.p95},
          {"stddev", s.stddev}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

json to_json(const OffsetScheme& offsets) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformSpan>) {
          return {{"kind", "UniformSpan"}, {"v_min", s.v_min}, {"v_max", s.v_max}};
        } else if constexpr (std::is_same_v<T, ExplicitList>) {
          return {{"kind", "ExplicitList"}, {"values", s.values}};
        } else {
          return {{"kind", "Constant"}, {"v", s.v}};
        }
      },
      offsets);
}

OffsetScheme offsets_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) throw InvalidParameter("offsets need a 'kind'");
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "UniformSpan") {
    reject_unknown(doc, "offsets", {"kind", "v_min", "v_max"});
    return UniformSpan{doc.at("v_min").get<double>(), doc.at("v_max").get<double>()};
  }
  if (kind == "ExplicitList") {
    reject_unknown(doc, "offsets", {"kind", "values"});
    return ExplicitList{doc.at("values").get<std::vector<double>>()};
  }
  if (kind == "Constant") {
    reject_unknown(doc, "offsets", {"kind", "v"});
    return ConstantOffset{doc.at("v").get<double>()};
  }
  throw InvalidParameter("unknown offset kind '" + kind + "'");
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["task"] = {{"name", to_string(cfg.task.name)},
               {"domain", {cfg.task.x_lo, cfg.task.x_hi}},
               {"n_train", cfg.task.n_train},
               {"n_test", cfg.task.n_test}};
  j["L"] = cfg.L;
  j["offsets"] = to_json(cfg.offsets);
  j["mismatch"] = {{"sigma_Vos", cfg.mismatch.sigma_vos},
                   {"sigma_Ib_rel", cfg.mismatch.sigma_ib_rel},
                   {"sigma_mirror_rel", cfg.mismatch.sigma_mirror_rel},
                   {"sigma_n", cfg.mismatch.sigma_n}};
  j["quant_bits"] = cfg.quant_bits ? json(*cfg.quant_bits) : json(nullptr);
  j["seed"] = cfg.seed;
  j["nominal"] = {{"I_b", cfg.nominal.bias_current},
                  {"n", cfg.nominal.slope_factor},
                  {"V_ref", cfg.nominal.v_ref},
                  {"dV_os", cfg.nominal.offset_voltage},
                  {"g_mirror", cfg.nominal.mirror_gain}};
  j["U_T"] = cfg.constants.thermal_voltage;
  j["input_map"] = {{"x_lo", cfg.input_map.x_lo},
                    {"x_hi", cfg.input_map.x_hi},
                    {"v_lo", cfg.input_map.v_lo},
                    {"v_hi", cfg.input_map.v_hi}};
  j["ridge"] = cfg.ridge;
  return j;
}

ExperimentConfig config_from_json(const json& doc, ExperimentConfig cfg) {
  try {
    reject_unknown(doc, "config",
                   {"task", "L", "offsets", "mismatch", "quant_bits", "seed", "output_dir",
                    "nominal", "U_T", "input_map", "ridge"});
    if (doc.contains("task")) {
      const json& t = doc.at("task");
      reject_unknown(t, "task", {"name", "domain", "n_train", "n_test"});
      if (t.contains("name")) cfg.task.name = parse_task(t.at("name").get<std::string>());
      if (t.contains("domain")) {
        const auto d = t.at("domain").get<std::vector<double>>();
        if (d.size() != 2) throw InvalidParameter("task.domain must be [x_lo, x_hi]");
        cfg.task.x_lo = d[0];
        cfg.task.x_hi = d[1];
      }
      read(t, "n_train", cfg.task.n_train);
      read(t, "n_test", cfg.task.n_test);
    }
    read(doc, "L", cfg.L);
    if (doc.contains("offsets")) cfg.offsets = offsets_from_json(doc.at("offsets"));
    if (doc.contains("mismatch")) {
      const json& m = doc.at("mismatch");
      reject_unknown(m, "mismatch", {"sigma_Vos", "sigma_Ib_rel", "sigma_mirror_rel", "sigma_n"});
      read(m, "sigma_Vos", cfg.mismatch.sigma_vos);
      read(m, "sigma_Ib_rel", cfg.mismatch.sigma_ib_rel);
      read(m, "sigma_mirror_rel", cfg.mismatch.sigma_mirror_rel);
      read(m, "sigma_n", cfg.mismatch.sigma_n);
    }
    if (doc.contains("quant_bits")) {
      const json& q = doc.at("quant_bits");
      cfg.quant_bits = q.is_null() ? std::nullopt : std::optional<int>(q.get<int>());
    }
    read(doc, "seed", cfg.seed);
    if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("nominal")) {
      const json& n = doc.at("nominal");
      reject_unknown(n, "nominal", {"I_b", "n", "V_ref", "dV_os", "g_mirror"});
      read(n, "I_b", cfg.nominal.bias_current);
      read(n, "n", cfg.nominal.slope_factor);
      read(n, "V_ref", cfg.nominal.v_ref);
      read(n, "dV_os", cfg.nominal.offset_voltage);
      read(n, "g_mirror", cfg.nominal.mirror_gain);
    }
    read(doc, "U_T", cfg.constants.thermal_voltage);
    if (doc.contains("input_map")) {
      const json& m = doc.at("input_map");
      reject_unknown(m, "input_map", {"x_lo", "x_hi", "v_lo", "v_hi"});
      read(m, "x_lo", cfg.input_map.x_lo);
      read(m, "x_hi", cfg.input_map.x_hi);
      read(m, "v_lo", cfg.input_map.v_lo);
      read(m, "v_hi", cfg.input_map.v_hi);
    }
    read(doc, "ridge", cfg.ridge);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("bad config: ") + e.what());
  }
  // The input map's task-space domain follows the task domain unless set.
  if (!doc.contains("input_map") || !doc.at("input_map").contains("x_lo")) cfg.input_map.x_lo = cfg.task.x_lo;
  if (!doc.contains("input_map") || !doc.at("input_map").contains("x_hi")) cfg.input_map.x_hi = cfg.task.x_hi;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidParameter("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc, std::move(base));
}

json to_json(const ExperimentReport& r, bool include_timing) {
  json j;
  j["experiment"] = "regress";
  j["config"] = to_json(r.config);
  j["train_nrmse"] = r.train_nrmse;
  j["test_nrmse"] = r.test_nrmse;
  if (r.test_nrmse_real) j["test_nrmse_real"] = *r.test_nrmse_real;
  j["capacity"] = r.capacity;
  j["rank"] = r.rank;
  j["condition_number"] = r.condition_number;
  j["ridge_active"] = r.ridge_active;
  j["files"] = files_json(r.files);
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

json to_json(const HeterogeneityReport& r, bool include_timing) {
  json j;
  j["experiment"] = "hetero";
  j["config"] = to_json(r.config);
  json arms = json::array();
  for (const auto& a : r.arms) {
    arms.push_back({{"arm", a.arm},
                    {"rank", a.rank},
                    {"capacity", a.capacity},
                    {"condition_number", a.condition_number},
                    {"train_nrmse", a.train_nrmse},
                    {"test_nrmse", a.test_nrmse}});
  }
  j["arms"] = arms;
  j["baseline_nrmse"] = r.baseline_nrmse;
  j["files"] = files_json(r.files);
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

json to_json(const BitDepthReport& r, bool include_timing) {
  json j;
  j["experiment"] = "bits";
  j["config"] = to_json(r.config);
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"bits", row.bits ? json(*row.bits) : json("real")},
                    {"train_nrmse", row.train_nrmse},
                    {"test_nrmse", row.test_nrmse}});
  }
  j["rows"] = rows;
  j["files"] = files_json(r.files);
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

json to_json(const MonteCarloReport& r, bool include_timing) {
  json j;
  j["experiment"] = "mc";
  j["config"] = to_json(r.config);
  j["n_chips"] = r.n_chips;
  j["test_nrmse"] = summary_json(r.test_nrmse);
  j["capacity"] = summary_json(r.capacity);
  j["files"] = files_json(r.files);
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

}  // namespace tab
