#include "genflow/catalog.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

namespace genflow {

using nlohmann::json;

namespace {

std::vector<TensorEntry> parse_entries(const json& arr, const char* what,
                                       int dim, bool triple) {
  std::vector<TensorEntry> out;
  if (arr.is_null()) return out;
  if (!arr.is_array())
    throw std::invalid_argument(std::string(what) + " must be an array");
  std::set<std::tuple<int, int, int>> seen;
  for (const json& e : arr) {
    TensorEntry t;
    t.i = e.at("i").get<int>();
    t.j = e.at("j").get<int>();
    t.k = e.at("k").get<int>();
    t.v = e.at("v").get<double>();
    auto bad = [&](const std::string& msg) {
      std::ostringstream os;
      os << what << " entry (i=" << t.i << ", j=" << t.j << ", k=" << t.k
         << "): " << msg;
      throw std::invalid_argument(os.str());
    };
    if (t.i < 1 || t.j < 1 || t.k < 1 || t.i > dim || t.j > dim || t.k > dim)
      bad("index out of range (1-based)");
    if (triple) {
      if (!(t.i < t.j && t.j < t.k)) bad("indices must satisfy i < j < k");
    } else {
      if (!(t.i < t.j)) bad("indices must satisfy i < j");
    }
    if (!seen.insert({t.i, t.j, t.k}).second) bad("duplicate key");
    if (!std::isfinite(t.v)) bad("non-finite value");
    out.push_back(t);
  }
  return out;
}

}  // namespace

AlgebraSpec parse_spec(const json& j) {
  AlgebraSpec spec;
  if (!j.is_object()) throw std::invalid_argument("spec must be a JSON object");
  spec.name = j.value("name", std::string("unnamed"));
  if (!j.contains("dim")) throw std::invalid_argument("spec missing \"dim\"");
  spec.dim = j.at("dim").get<int>();
  if (spec.dim < 1 || spec.dim > kMaxDim)
    throw std::invalid_argument("spec dim out of supported range");
  spec.mu = parse_entries(j.contains("mu") ? j.at("mu") : json(),
                          "mu", spec.dim, false);
  spec.H = parse_entries(j.contains("H") ? j.at("H") : json(),
                         "H", spec.dim, true);
  if (j.contains("metadata")) spec.metadata = j.at("metadata").dump();
  return spec;
}

json spec_to_json(const AlgebraSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["dim"] = spec.dim;
  j["mu"] = json::array();
  for (const TensorEntry& e : spec.mu)
    j["mu"].push_back({{"i", e.i}, {"j", e.j}, {"k", e.k}, {"v", e.v}});
  j["H"] = json::array();
  for (const TensorEntry& e : spec.H)
    j["H"].push_back({{"i", e.i}, {"j", e.j}, {"k", e.k}, {"v", e.v}});
  if (!spec.metadata.empty()) j["metadata"] = json::parse(spec.metadata);
  return j;
}

AlgebraSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("parse error in " + path + ": " + e.what());
  }
  return parse_spec(j);
}

void save_spec_file(const AlgebraSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << spec_to_json(spec).dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

DorfmanBracket to_dorfman(const AlgebraSpec& spec, double tol) {
  LieBracket mu(spec.dim);
  for (const TensorEntry& e : spec.mu)
    mu.set_entry(e.i - 1, e.j - 1, e.k - 1, e.v);
  KForm H(spec.dim, 3);
  for (const TensorEntry& e : spec.H) {
    int idx[3] = {e.i - 1, e.j - 1, e.k - 1};
    H.add(std::span<const int>(idx, 3), e.v);
  }
  return DorfmanBracket::checked(std::move(mu), std::move(H), tol);
}

AlgebraSpec from_dorfman(const std::string& name, const DorfmanBracket& mud) {
  AlgebraSpec spec;
  spec.name = name;
  spec.dim = mud.dim();
  const int n = mud.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = mud.mu.comp(i, j, k);
        if (v != 0.0) spec.mu.push_back({i + 1, j + 1, k + 1, v});
      }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        double v = mud.H.eval({i, j, k});
        if (v != 0.0) spec.H.push_back({i + 1, j + 1, k + 1, v});
      }
  return spec;
}

namespace {

AlgebraSpec named(AlgebraSpec s, const std::string& name) {
  s.name = name;
  return s;
}

Endomorphism diag4(double a, double b, double c, double d) {
  Eigen::Vector4d v(a, b, c, d);
  return v.asDiagonal();
}

}  // namespace

AlgebraSpec make_abelian(int n) {
  AlgebraSpec s;
  s.name = "abelian" + std::to_string(n);
  s.dim = n;
  return s;
}

AlgebraSpec make_n3(double a, double b) {
  AlgebraSpec s;
  s.name = "n3";
  s.dim = 3;
  if (a != 0.0) s.mu.push_back({1, 2, 3, a});
  if (b != 0.0) s.H.push_back({1, 2, 3, b});
  return s;
}

AlgebraSpec make_heis3xRk(int k) {
  AlgebraSpec s;
  s.name = "heis3xR" + std::to_string(k);
  s.dim = 3 + k;
  s.mu.push_back({1, 2, 3, 1.0});
  s.H.push_back({1, 2, 3, 1.0});
  return s;
}

AlgebraSpec make_n3R_item1() {
  AlgebraSpec s;
  s.name = "n3R-item1";
  s.dim = 4;
  s.mu.push_back({1, 2, 3, 1.0});
  s.H.push_back({1, 2, 3, 1.0});
  return s;
}

AlgebraSpec make_n3R_item2(double l1, double l2) {
  AlgebraSpec s;
  s.name = "n3R-item2";
  s.dim = 4;
  s.mu.push_back({1, 2, 3, 1.0});
  if (l1 != 0.0) s.H.push_back({2, 3, 4, l1});
  if (l2 != 0.0) s.H.push_back({1, 3, 4, l2});
  return s;
}

AlgebraSpec make_n4(double a, double b, double c) {
  AlgebraSpec s;
  s.name = "n4";
  s.dim = 4;
  if (a != 0.0) s.mu.push_back({1, 2, 3, a});
  if (b != 0.0) s.mu.push_back({1, 2, 4, b});
  if (c != 0.0) s.mu.push_back({1, 3, 4, c});
  return s;
}

AlgebraSpec make_n4_item1() {
  double c = std::sqrt(3.0) / 2.0;
  AlgebraSpec s = make_n4(1.0, 0.0, c);
  s.name = "n4-item1";
  s.H.push_back({1, 3, 4, c});
  return s;
}

AlgebraSpec make_n4_item2() {
  AlgebraSpec s = make_n4(1.0, 0.0, 1.0);
  s.name = "n4-item2";
  s.H.push_back({2, 3, 4, 1.0});
  return s;
}

AlgebraSpec make_so3() {
  AlgebraSpec s;
  s.name = "so3";
  s.dim = 3;
  s.mu.push_back({1, 2, 3, 1.0});
  s.mu.push_back({2, 3, 1, 1.0});
  s.mu.push_back({1, 3, 2, -1.0});  // mu(e3, e1) = e2
  return s;
}

AlgebraSpec make_sol3() {
  AlgebraSpec s;
  s.name = "sol3";
  s.dim = 3;
  s.mu.push_back({1, 3, 1, -1.0});  // mu(e3, e1) = e1
  s.mu.push_back({2, 3, 2, 1.0});   // mu(e3, e2) = -e2
  s.H.push_back({1, 2, 3, 1.0});
  return s;
}

AlgebraSpec make_aff1() {
  AlgebraSpec s;
  s.name = "aff1";
  s.dim = 2;
  s.mu.push_back({1, 2, 2, 1.0});
  return s;
}

ExpectedCertificate n3R_item2_expected(double l1, double l2) {
  ExpectedCertificate e;
  e.lambda = -1.5;
  e.D = Endomorphism::Zero(4, 4);
  e.D(0, 0) = 1.0 - l2 * l2 / 2.0;
  e.D(1, 1) = 1.0 - l1 * l1 / 2.0;
  e.D(2, 2) = 1.5;
  e.D(3, 3) = 1.0;
  e.D(0, 1) = e.D(1, 0) = -0.5 * l1 * l2;
  e.soliton_class = SolitonClass::Expanding;
  return e;
}

const std::vector<CatalogEntry>& catalog() {
  static std::once_flag flag;
  static std::vector<CatalogEntry> entries;
  std::call_once(flag, [] {
    auto add = [&](AlgebraSpec spec, std::optional<ExpectedCertificate> exp,
                   bool control = false) {
      entries.push_back({std::move(spec), std::move(exp), control});
    };
    const double r2 = std::sqrt(0.5);

    add(make_abelian(3), std::nullopt);
    add(make_abelian(4), std::nullopt);

    // Classical nilsoliton (H = 0).
    add(named(make_n3(1.0, 0.0), "n3"),
        ExpectedCertificate{-1.5,
                            Eigen::Vector3d(1, 1, 2).asDiagonal(),
                            SolitonClass::Expanding});
    // Torsion nilsoliton, a = b = 1.
    add(named(make_n3(1.0, 1.0), "n3-soliton"),
        ExpectedCertificate{-2.0,
                            Eigen::Vector3d(1, 1, 2).asDiagonal(),
                            SolitonClass::Expanding});
    // Control: torsion equation fails unless a^2 = b^2.
    add(named(make_n3(1.0, 2.0), "n3-b2a"), std::nullopt, true);

    add(make_n3R_item1(),
        ExpectedCertificate{-2.0, diag4(1, 1, 2, 2), SolitonClass::Expanding});
    add(named(make_n3R_item2(1.0, 0.0), "n3R-item2-10"),
        n3R_item2_expected(1.0, 0.0));
    add(named(make_n3R_item2(0.0, 1.0), "n3R-item2-01"),
        n3R_item2_expected(0.0, 1.0));
    add(named(make_n3R_item2(r2, r2), "n3R-item2-mix"),
        n3R_item2_expected(r2, r2));
    // Control: H = e^{124} is closed but supports no soliton on n3 + R.
    {
      AlgebraSpec s;
      s.name = "n3R-l3-control";
      s.dim = 4;
      s.mu.push_back({1, 2, 3, 1.0});
      s.H.push_back({1, 2, 4, 1.0});
      add(std::move(s), std::nullopt, true);
    }

    // Classical filiform nilsoliton (H = 0) at a = c = 1.
    add(named(make_n4(1.0, 0.0, 1.0), "n4"),
        ExpectedCertificate{-1.5, diag4(0.5, 1.0, 1.5, 2.0),
                            SolitonClass::Expanding});
    add(make_n4_item1(),
        ExpectedCertificate{-1.5, diag4(0.25, 1.0, 1.25, 1.5),
                            SolitonClass::Expanding});
    add(make_n4_item2(),
        ExpectedCertificate{-1.5, diag4(0.5, 0.5, 1.0, 1.5),
                            SolitonClass::Expanding});
    // Control: the e^{124}-branch admits no soliton for any parameters; the
    // derivation equation alone is solvable at c^2 = a^2 + 2/3, making the
    // torsion equation the failing one.
    {
      AlgebraSpec s = make_n4(1.0, 0.0, std::sqrt(5.0 / 3.0));
      s.name = "n4-l3-control";
      s.H.push_back({1, 2, 4, 1.0});
      add(std::move(s), std::nullopt, true);
    }

    {
      Endomorphism D5 = Endomorphism::Zero(5, 5);
      D5.diagonal() << 1, 1, 2, 2, 2;
      add(make_heis3xRk(1),
          ExpectedCertificate{-2.0, diag4(1, 1, 2, 2), SolitonClass::Expanding});
      add(make_heis3xRk(2),
          ExpectedCertificate{-2.0, D5, SolitonClass::Expanding});
    }

    add(make_so3(),
        ExpectedCertificate{0.5, Endomorphism::Zero(3, 3),
                            SolitonClass::Shrinking});
    add(make_sol3(), std::nullopt);
    add(make_aff1(),
        ExpectedCertificate{-1.0, Endomorphism::Zero(2, 2),
                            SolitonClass::Expanding});
  });
  return entries;
}

const CatalogEntry* catalog_find(const std::string& name) {
  for (const CatalogEntry& e : catalog())
    if (e.spec.name == name) return &e;
  return nullptr;
}

}  // namespace genflow
