#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include "genflow/catalog.hpp"

namespace genflow {

const char* const kTrajectoryCsvHeader =
    "t,norm2_mud,gen_scalar,scal,norm2_H,jacobi_res,dH_res,dstarH_norm,ell,"
    "step_size";

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

void emit_trajectory_csv(const std::vector<TrajectorySample>& traj,
                         std::ostream& os) {
  os << kTrajectoryCsvHeader << "\n";
  for (const TrajectorySample& s : traj) {
    os << format_double(s.t) << ',' << format_double(s.norm2_mud) << ','
       << format_double(s.gen_scalar) << ',' << format_double(s.scal) << ','
       << format_double(s.norm2_H) << ',' << format_double(s.jacobi_residual)
       << ',' << format_double(s.dH_residual) << ','
       << format_double(s.dstarH_norm) << ',' << format_double(s.ell) << ','
       << format_double(s.step_size) << "\n";
  }
  if (!os) throw std::runtime_error("trajectory CSV write failed");
}

void emit_trajectory_csv(const std::vector<TrajectorySample>& traj,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  emit_trajectory_csv(traj, out);
}

}  // namespace genflow
