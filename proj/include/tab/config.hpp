#pragma once

// JSON (de)serialization of experiment configs and reports.
//
// Config documents mirror ExperimentConfig:
//
//   {
//     "task": {"name": "sin", "domain": [-1, 1], "n_train": 256, "n_test": 255},
//     "L": 34,
//     "offsets": {"kind": "UniformSpan", "v_min": 0.0, "v_max": 1.2},
//     "mismatch": {"sigma_Vos": 0.005, "sigma_Ib_rel": 0.05,
//                  "sigma_mirror_rel": 0.02, "sigma_n": 0.02},
//     "quant_bits": null,
//     "seed": 1,
//     "output_dir": "tab_out",
//     "nominal": {"I_b": 1e-9, "n": 1.3, "V_ref": 0.6, "dV_os": 0, "g_mirror": 1},
//     "U_T": 0.02585,
//     "input_map": {"x_lo": -1, "x_hi": 1, "v_lo": 0.0, "v_hi": 1.2},
//     "ridge": 0
//   }
//
// Every key is optional; missing keys keep their defaults and unknown keys are
// rejected. Offsets also accept {"kind": "ExplicitList", "values": [...]} and
// {"kind": "Constant", "v": ...}.

#include <filesystem>

#include "json.hpp"

#include "tab/experiments.hpp"

namespace tab {

/// Config echo. output_dir is left out so reports from different output
/// directories stay byte-identical.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Overlays `doc` onto `base`.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base = {});

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

nlohmann::json to_json(const OffsetScheme& offsets);
OffsetScheme offsets_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ExperimentReport& report, bool include_timing);
nlohmann::json to_json(const HeterogeneityReport& report, bool include_timing);
nlohmann::json to_json(const BitDepthReport& report, bool include_timing);
nlohmann::json to_json(const MonteCarloReport& report, bool include_timing);

}  // namespace tab
