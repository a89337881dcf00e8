#pragma once

#include "fc/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fc {

std::string fmt6(double v);  // CSV number format, 6 significant digits

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
void write_table_csv(std::ostream& os, const ResultTable& t);
void write_xy(const std::string& path, const std::vector<double>& x, const std::vector<std::vector<double>>& cols);

// ---- Problem 1: harmonic truth in (0,L) x (0,height) ----
struct Problem1Result {
  double delta = 0.0;
  double err_left = 0.0, err_right = 0.0, err_split = 0.0, err_exact = 0.0;
  double dc_alpha = 0.0;
  std::vector<Band> bands;
  ContinuationStats left_stats, right_stats;
  std::vector<double> x;
  std::vector<double> fig_y;  // 1/3, 2/3, 1 of the height
  std::vector<std::vector<double>> fig_truth, fig_left, fig_right, fig_split;
};
std::vector<double> problem1_truth(const ExperimentConfig& c, const std::vector<double>& x, double y);
Problem1Result run_problem1(const ExperimentConfig& c, double delta);

// ---- Problem 2 ----
struct Problem2Setup {
  InterfaceBC::Kind kind = InterfaceBC::Kind::D;
  Curve truth;
  std::vector<double> f, g, gamma;
  std::vector<std::string> warnings;
};
Curve truth_curve(const ExperimentConfig& c, int n);
Problem2Setup synthesize_problem2(const ExperimentConfig& c, InterfaceBC::Kind kind);

struct Problem2Cell {
  InterfaceBC::Kind kind = InterfaceBC::Kind::D;
  double delta = 0.0;
  RecoveryTrace trace;
  std::vector<Band> bands;
  double relerr = 0.0;
  int iterations = 0;
  std::string error;  // nonempty if the cell failed
};
Problem2Cell run_problem2_cell(const ExperimentConfig& c, const Problem2Setup& s, double delta);

// ---- Problem 3 ----
struct Problem3Setup {
  Curve truth;
  std::vector<double> gamma, f1, f2, g1, g2;
  double min_wronskian = 0.0;  // min |W| / max |W| over the interior of the truth curve
  std::vector<std::string> warnings;
};
std::vector<double> truth_gamma(const ExperimentConfig& c, int n);
Problem3Setup synthesize_problem3(const ExperimentConfig& c);

struct Problem3Cell {
  double delta = 0.0;
  JointTrace trace;                // reduced method
  std::vector<FrozenIter> frozen;  // frozen method
  Curve ell;
  std::vector<double> gamma;
  double relerr_ell = 0.0, relerr_gam = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
  std::string error;
};
Problem3Cell run_problem3_cell(const ExperimentConfig& c, const Problem3Setup& s, double delta);

// ---- pipelines with file output ----
struct RunOutcome {
  ResultTable table;
  int failed_cells = 0;
  std::vector<std::string> log;
};

// Writes <out>/table.csv, traces and curve dumps.
RunOutcome run(const ExperimentConfig& c, const std::string& out_dir);
// Writes the synthesized data (x, f, g, g^delta per level).
void write_synthesis(const ExperimentConfig& c, const std::string& out_dir);

}  // namespace fc
