#pragma once

#include <limits>
#include <string>
#include <vector>

namespace drrp {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { kLe, kEq, kGe };

/// Minimization LP/MIP in triplet form:
///   min c'x  s.t.  a_i'x {<=,=,>=} rhs_i,  lb <= x <= ub,
/// with an optional integer marking per variable. Every variable must have
/// at least one finite bound.
struct LinearProgram {
  struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
  };

  std::vector<double> obj;
  std::vector<double> lb;
  std::vector<double> ub;
  std::vector<char> is_integer;
  std::vector<std::string> var_names;

  std::vector<RowSense> sense;
  std::vector<double> rhs;
  std::vector<std::string> row_names;

  std::vector<Triplet> entries;

  int num_vars() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  int add_var(double lower, double upper, double cost, bool integer = false,
              std::string name = "");
  int add_row(RowSense s, double right, std::string name = "");
  void add_entry(int row, int col, double value);

  /// Structural validity check; returns one message per defect.
  std::vector<std::string> validate() const;
};

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterLimit,
  kTimeLimit,
};

struct LpSolution {
  LpStatus status = LpStatus::kIterLimit;
  double objective = 0.0;
  std::vector<double> x;              // structural variables
  std::vector<double> duals;          // one per row
  std::vector<double> reduced_costs;  // one per structural variable
};

/// MPS fixed-format text for cross-checking against external solvers.
std::string lp_to_mps(const LinearProgram& lp, const std::string& name = "LP");

}  // namespace drrp
