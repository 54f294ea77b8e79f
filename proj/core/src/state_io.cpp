#include "oldroyd/state_io.hpp"

#include <fstream>

#include <json.hpp>

#include "oldroyd/checkpoint.hpp"
#include "oldroyd/errors.hpp"

namespace oldroyd {

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

void save_state(const std::filesystem::path& path, const State& s, const ModelParams& params,
                const StepperConfig& config, std::int64_t step) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_record(out, to_record(s.u));
    write_record(out, to_record(s.tau));
    if (!out) throw IoError("write failed for " + path.string());
  }
  nlohmann::ordered_json meta;
  meta["format"] = "oldroyd-state";
  meta["grid"] = {{"dim", s.grid().dim()}, {"size", s.grid().size()},
                  {"dealias_fraction", s.grid().dealias_fraction()}};
  meta["model"] = {{"variant", std::string(to_string(params.variant))},
                   {"nu", params.nu},
                   {"alpha", params.alpha},
                   {"k1", params.k1},
                   {"k2", params.k2},
                   {"b", params.b}};
  meta["stepper"] = {{"dt", config.dt},
                     {"scheme", std::string(to_string(config.scheme))},
                     {"t_end", config.t_end},
                     {"output_every", config.output_every},
                     {"cfl_safety", config.cfl_safety}};
  meta["step"] = step;
  meta["t"] = s.t;
  std::ofstream side(sidecar_path(path));
  if (!side) throw IoError("cannot open sidecar for " + path.string());
  side << meta.dump(2) << '\n';
}

StateCheckpoint load_state(const std::filesystem::path& path) {
  std::ifstream side(sidecar_path(path));
  if (!side) throw IoError("missing sidecar " + sidecar_path(path).string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(side);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed sidecar: " + std::string(e.what()));
  }
  try {
    const double dealias = meta.at("grid").at("dealias_fraction").get<double>();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    auto u = from_record<VectorShape>(read_record(in, dealias));
    auto tau = from_record<SymTensorShape>(read_record(in, dealias));

    ModelParams p;
    const auto& m = meta.at("model");
    p.variant = parse_variant(m.at("variant").get<std::string>());
    p.nu = m.at("nu").get<double>();
    p.alpha = m.at("alpha").get<double>();
    p.k1 = m.at("k1").get<double>();
    p.k2 = m.at("k2").get<double>();
    p.b = m.at("b").get<double>();

    StepperConfig c;
    const auto& st = meta.at("stepper");
    c.dt = st.at("dt").get<double>();
    c.scheme = parse_scheme(st.at("scheme").get<std::string>());
    c.t_end = st.at("t_end").get<double>();
    c.output_every = st.at("output_every").get<int>();
    c.cfl_safety = st.at("cfl_safety").get<double>();

    const auto step = meta.at("step").get<std::int64_t>();
    State s(std::move(u), std::move(tau), static_cast<double>(step) * c.dt);
    return {std::move(s), p, c, step};
  } catch (const nlohmann::json::exception& e) {
    throw IoError("incomplete sidecar: " + std::string(e.what()));
  }
}

}  // namespace oldroyd
