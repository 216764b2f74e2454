#include <cmath>
#include <sstream>

#include "drrp/linear_program.hpp"

namespace drrp {

int LinearProgram::add_var(double lower, double upper, double cost,
                           bool integer, std::string name) {
  lb.push_back(lower);
  ub.push_back(upper);
  obj.push_back(cost);
  is_integer.push_back(integer ? 1 : 0);
  var_names.push_back(std::move(name));
  return num_vars() - 1;
}

int LinearProgram::add_row(RowSense s, double right, std::string name) {
  sense.push_back(s);
  rhs.push_back(right);
  row_names.push_back(std::move(name));
  return num_rows() - 1;
}

void LinearProgram::add_entry(int row, int col, double value) {
  if (value != 0.0) entries.push_back({row, col, value});
}

std::vector<std::string> LinearProgram::validate() const {
  std::vector<std::string> out;
  for (int j = 0; j < num_vars(); ++j) {
    if (!(lb[j] <= ub[j]))
      out.push_back("variable " + std::to_string(j) + " has lb > ub");
    if (lb[j] == -kLpInfinity && ub[j] == kLpInfinity)
      out.push_back("variable " + std::to_string(j) + " is free (unsupported)");
    if (!std::isfinite(obj[j]))
      out.push_back("variable " + std::to_string(j) + " has non-finite cost");
  }
  for (int r = 0; r < num_rows(); ++r)
    if (!std::isfinite(rhs[r]))
      out.push_back("row " + std::to_string(r) + " has non-finite rhs");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= num_rows() || t.col < 0 || t.col >= num_vars()) {
      out.push_back("entry index out of range");
      break;
    }
    if (!std::isfinite(t.value)) {
      out.push_back("non-finite matrix entry");
      break;
    }
  }
  return out;
}

namespace {

std::string var_name(const LinearProgram& lp, int j) {
  if (!lp.var_names[j].empty()) return lp.var_names[j];
  return "X" + std::to_string(j);
}

std::string row_name(const LinearProgram& lp, int r) {
  if (!lp.row_names[r].empty()) return lp.row_names[r];
  return "R" + std::to_string(r);
}

void num(std::ostringstream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out << buf;
}

}  // namespace

std::string lp_to_mps(const LinearProgram& lp, const std::string& name) {
  std::ostringstream out;
  out << "NAME " << name << "\n";
  out << "ROWS\n N COST\n";
  for (int r = 0; r < lp.num_rows(); ++r) {
    char s = lp.sense[r] == RowSense::kLe   ? 'L'
             : lp.sense[r] == RowSense::kEq ? 'E'
                                            : 'G';
    out << " " << s << " " << row_name(lp, r) << "\n";
  }

  // Column-major traversal of the triplets.
  std::vector<std::vector<std::pair<int, double>>> cols(lp.num_vars());
  for (const auto& t : lp.entries) cols[t.col].push_back({t.row, t.value});

  out << "COLUMNS\n";
  bool in_int = false;
  for (int j = 0; j < lp.num_vars(); ++j) {
    bool integer = lp.is_integer[j] != 0;
    if (integer && !in_int) {
      out << " MARKER M" << j << " 'MARKER' 'INTORG'\n";
      in_int = true;
    } else if (!integer && in_int) {
      out << " MARKER M" << j << " 'MARKER' 'INTEND'\n";
      in_int = false;
    }
    if (lp.obj[j] != 0.0) {
      out << " " << var_name(lp, j) << " COST ";
      num(out, lp.obj[j]);
      out << "\n";
    }
    for (const auto& [r, v] : cols[j]) {
      out << " " << var_name(lp, j) << " " << row_name(lp, r) << " ";
      num(out, v);
      out << "\n";
    }
  }
  if (in_int) out << " MARKER MEND 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (int r = 0; r < lp.num_rows(); ++r) {
    if (lp.rhs[r] == 0.0) continue;
    out << " RHS " << row_name(lp, r) << " ";
    num(out, lp.rhs[r]);
    out << "\n";
  }

  out << "BOUNDS\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    const std::string vn = var_name(lp, j);
    if (lp.lb[j] == lp.ub[j]) {
      out << " FX BND " << vn << " ";
      num(out, lp.lb[j]);
      out << "\n";
      continue;
    }
    if (lp.lb[j] == -kLpInfinity)
      out << " MI BND " << vn << "\n";
    else if (lp.lb[j] != 0.0) {
      out << " LO BND " << vn << " ";
      num(out, lp.lb[j]);
      out << "\n";
    }
    if (lp.ub[j] != kLpInfinity) {
      out << " UP BND " << vn << " ";
      num(out, lp.ub[j]);
      out << "\n";
    }
  }
  out << "ENDATA\n";
  return out.str();
}

}  // namespace drrp
