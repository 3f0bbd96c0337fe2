#include "qdisc/certificate_json.hpp"

#include <fstream>
#include <stdexcept>

#include "qdisc/version.hpp"

namespace qdisc {

using nlohmann::json;

json scalar_to_json(const QuadExt& x) {
  if (x.is_rational()) return to_string(x.a());
  return json{{"a", to_string(x.a())}, {"b", to_string(x.b())}, {"d", std::to_string(x.radicand())}};
}

QuadExt scalar_from_json(const json& j) {
  if (j.is_string()) return QuadExt(parse_rational(j.get<std::string>()));
  return QuadExt(parse_rational(j.at("a").get<std::string>()), parse_rational(j.at("b").get<std::string>()),
                 parse_rational(j.at("d").get<std::string>()));
}

json bound_to_json(const RadicalSum& x) {
  if (x.is_rational()) return to_string(x.rational_part());
  json terms = json::array();
  for (const auto& [d, coef] : x.terms()) terms.push_back({{"d", std::to_string(d)}, {"coef", to_string(coef)}});
  return json{{"radical_sum", terms}};
}

RadicalSum bound_from_json(const json& j) {
  if (j.is_string()) return RadicalSum(parse_rational(j.get<std::string>()));
  RadicalSum out;
  for (const auto& t : j.at("radical_sum")) {
    out.add_term(std::stoll(t.at("d").get<std::string>()), parse_rational(t.at("coef").get<std::string>()));
  }
  return out;
}

namespace {

json space_to_json(const SpaceStructure& s) {
  json out = json::array();
  for (const auto& sys : s.systems()) out.push_back({{"label", sys.label}, {"dim", sys.dim}});
  return out;
}

SpaceStructure space_from_json(const json& j) {
  std::vector<Subsystem> systems;
  for (const auto& sys : j) systems.push_back({sys.at("label").get<std::string>(), sys.at("dim").get<std::size_t>()});
  return SpaceStructure(std::move(systems));
}

json matrix_to_json(const std::string& name, const ExactLabeled& m) {
  json entries = json::array();
  for (const auto& z : m.entries.data()) entries.push_back({{"re", scalar_to_json(z.re)}, {"im", scalar_to_json(z.im)}});
  return json{{"name", name}, {"space", space_to_json(m.space)}, {"entries", entries}};
}

ExactLabeled matrix_from_json(const json& j) {
  const SpaceStructure space = space_from_json(j.at("space"));
  const std::size_t n = space.total_dim();
  const json& entries = j.at("entries");
  if (entries.size() != n * n) throw std::invalid_argument("certificate: witness has wrong entry count");
  ExactMatrix m(n, n);
  for (std::size_t k = 0; k < n * n; ++k) {
    m.data()[k] = ExactComplex(scalar_from_json(entries[k].at("re")), scalar_from_json(entries[k].at("im")));
  }
  return ExactLabeled(space, std::move(m));
}

}  // namespace

json certificate_to_json(const Certificate& c) {
  json meta{{"generator", std::string("qdisc ") + kVersion},
            {"strategy", to_string(c.strategy)},
            {"direction", to_string(c.direction)},
            {"ensemble_spec", c.ensemble_spec},
            {"copies", c.copies},
            {"radicand_d", c.radicands()},
            {"eta", to_string(c.eta)}};
  json ensemble = json::array();
  for (std::size_t i = 0; i < c.chois.size(); ++i) {
    ensemble.push_back({{"prior", to_string(c.priors[i])}, {"choi", matrix_to_json("C" + std::to_string(i + 1), c.chois[i])}});
  }
  json witnesses = json::array();
  for (const auto& w : c.witnesses) witnesses.push_back(matrix_to_json(w.name, w.matrix));
  json transcript = json::array();
  for (const auto& r : c.transcript) transcript.push_back({{"check", r.check}, {"subject", r.subject}, {"passed", r.passed}});
  return json{{"meta", meta},
              {"ensemble", ensemble},
              {"bound", bound_to_json(c.bound)},
              {"bound_decimal", c.bound.to_double()},
              {"witnesses", witnesses},
              {"transcript", transcript}};
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  const json& meta = j.at("meta");
  c.strategy = parse_strategy(meta.at("strategy").get<std::string>());
  c.direction = parse_direction(meta.at("direction").get<std::string>());
  c.ensemble_spec = meta.at("ensemble_spec").get<std::string>();
  c.copies = meta.at("copies").get<int>();
  c.eta = parse_rational(meta.at("eta").get<std::string>());
  for (const auto& m : j.at("ensemble")) {
    c.priors.push_back(parse_rational(m.at("prior").get<std::string>()));
    c.chois.push_back(matrix_from_json(m.at("choi")));
  }
  c.bound = bound_from_json(j.at("bound"));
  for (const auto& w : j.at("witnesses")) c.witnesses.push_back({w.at("name").get<std::string>(), matrix_from_json(w)});
  for (const auto& r : j.at("transcript")) {
    c.transcript.push_back({r.at("check").get<std::string>(), r.at("subject").get<std::string>(), r.at("passed").get<bool>()});
  }
  return c;
}

void save_certificate(const Certificate& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << certificate_to_json(c).dump(1) << '\n';
}

Certificate load_certificate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return certificate_from_json(json::parse(in));
}

}  // namespace qdisc
