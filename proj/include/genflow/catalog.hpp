#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "genflow/soliton.hpp"

// Built-in fixtures, JSON (de)serialization of brackets and the CSV
// trajectory format.

namespace genflow {

struct TensorEntry {
  int i = 0, j = 0, k = 0;  // 1-based in files and in this struct
  double v = 0.0;
};

struct AlgebraSpec {
  std::string name;
  int dim = 0;
  std::vector<TensorEntry> mu;  // mu(e_i, e_j) = sum v e_k, requires i < j
  std::vector<TensorEntry> H;   // H = sum v e^{ijk}, requires i < j < k
  std::string metadata;         // free-form JSON object, kept verbatim
};

AlgebraSpec parse_spec(const nlohmann::json& j);
nlohmann::json spec_to_json(const AlgebraSpec& spec);
AlgebraSpec load_spec_file(const std::string& path);
void save_spec_file(const AlgebraSpec& spec, const std::string& path);

DorfmanBracket to_dorfman(const AlgebraSpec& spec, double tol = 1e-9);
AlgebraSpec from_dorfman(const std::string& name, const DorfmanBracket& mud);

struct ExpectedCertificate {
  double lambda = 0.0;
  Endomorphism D;
  SolitonClass soliton_class = SolitonClass::Expanding;
};

struct CatalogEntry {
  AlgebraSpec spec;
  std::optional<ExpectedCertificate> expected;
  bool control = false;  // expected to fail soliton verification
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry* catalog_find(const std::string& name);

// Parameterized builders used by the catalog, tests and sweeps.
AlgebraSpec make_abelian(int n);
AlgebraSpec make_n3(double a, double b);               // mu = a e3, H = b e^123
AlgebraSpec make_heis3xRk(int k);                      // dim 3 + k, H = e^123
AlgebraSpec make_n3R_item1();                          // H = e^123
AlgebraSpec make_n3R_item2(double l1, double l2);      // H = l1 e^234 + l2 e^134
AlgebraSpec make_n4(double a, double b, double c);     // H = 0
AlgebraSpec make_n4_item1();
AlgebraSpec make_n4_item2();
AlgebraSpec make_so3();
AlgebraSpec make_sol3();
AlgebraSpec make_aff1();

// Expected certificate of the circle family at (l1, l2), natural scale.
ExpectedCertificate n3R_item2_expected(double l1, double l2);

// CSV trajectory output; header is fixed:
// t,norm2_mud,gen_scalar,scal,norm2_H,jacobi_res,dH_res,dstarH_norm,ell,step_size
extern const char* const kTrajectoryCsvHeader;
void emit_trajectory_csv(const std::vector<TrajectorySample>& traj,
                         std::ostream& os);
void emit_trajectory_csv(const std::vector<TrajectorySample>& traj,
                         const std::string& path);

// Locale-free shortest round-trip formatting used everywhere numbers are
// printed for machines.
std::string format_double(double v);

}  // namespace genflow
