#pragma once

#include <random>
#include <string>

#include "gipeps/lattice.hpp"

namespace gipeps {

// Parsed run configuration; see README for the schema. Unknown keys are
// rejected and the seed is mandatory.
struct RunConfig {
  GroupId group_id = GroupId::su2();
  std::vector<int> truncation;       // link/leg labels
  std::vector<int> physical;         // vertex labels; defaults to truncation
  std::map<int, int> degeneracy;     // leg degeneracy map
  Ordering ordering = Ordering::A;
  int lx = 2, ly = 2;
  bool periodic = false;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  int samples = 20;
  std::vector<std::string> suites;
  Complex tau_p{0.0, 0.0};
  std::optional<AlphaMap> alpha;               // explicit vertex parameters
  std::optional<std::map<int, Matrix>> beta;   // explicit link parameters

  std::string canonical_text;  // normalized form used for hashing
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string config_hash(const RunConfig& config);

// Deterministic parameter draws for configs without explicit values.
AlphaMap draw_alpha(const Group& g, const std::vector<int>& phys, const std::vector<int>& legs,
                    const std::map<int, int>& degeneracy, std::mt19937_64& rng);
std::map<int, Matrix> draw_beta(const std::vector<int>& labels,
                                const std::map<int, int>& degeneracy, std::mt19937_64& rng);

// Plain-text archive of a sparse complex tensor: a short header followed by
// index/value lines sorted lexicographically, floats with 17 significant
// digits so rewrites are byte-identical.
struct TensorArchive {
  std::string kind;
  std::string group;
  std::vector<int> truncation;
  std::vector<std::pair<std::vector<int>, Complex>> entries;
};

std::string to_text(const TensorArchive& a);
TensorArchive from_text(const std::string& text);

TensorArchive archive_vertex(const VertexTensor& t);
TensorArchive archive_link(const LinkTensor& t);
TensorArchive archive_unified(const UnifiedTensor& t);
TensorArchive archive_state(const LatticeState& s, const std::string& group);

struct CheckRecord {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string suite;
  std::vector<CheckRecord> checks;
  std::string config_hash;
  std::string environment;
};

std::string report_json(const Report& r);
bool all_passed(const Report& r);

// Command entry points; return process exit codes (0 pass, 1 check failure,
// 2 usage/config error, 3 resource guard).
int cmd_build(const RunConfig& config, const std::string& out_dir);
int cmd_check(const RunConfig& config, const std::string& out_dir);
int cmd_contract(const RunConfig& config, const std::string& out_dir);
int cmd_report(const std::string& report_path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace gipeps
