#pragma once
// Time series of global monitors shared by both flow engines.

#include <string>
#include <string_view>
#include <vector>

namespace hypermcf {

enum class FlowStatus { running, round_point, collapse_to_geodesic, step_limit };

[[nodiscard]] std::string_view to_string(FlowStatus s);

/// One monitor row; field order is the CSV column order.
struct TraceRow {
  double t = 0;
  double H_min = 0;
  double H_max = 0;
  double h_sq_max = 0;
  double ho_sq_max = 0;
  double pinch_margin_min = 0;
  double f_sigma_max = 0;
  double thm41_ratio_max = 0;  // sup |ho|^2 / |H|^(2(1 - sigma))
  double grad_ratio_max = 0;   // sup |grad H| / (|H|^2 + 1)
  double diam = 0;
  double x0_max = 0;
  double x0_bound = 0;         // x0_max(0) exp(nct)
};

inline constexpr const char* kTraceColumns[] = {"t",           "H_min",           "H_max",          "h_sq_max",
                                                "ho_sq_max",   "pinch_margin_min", "f_sigma_max",   "thm41_ratio_max",
                                                "grad_ratio_max", "diam",          "x0_max",         "x0_bound"};

class FlowTrace {
 public:
  /// Rows must have strictly increasing t.
  void append(const TraceRow& row);
  /// Sets the terminal status; a second call throws.
  void finish(FlowStatus status, double extinction_time);

  [[nodiscard]] const std::vector<TraceRow>& rows() const { return rows_; }
  [[nodiscard]] FlowStatus status() const { return status_; }
  [[nodiscard]] double extinction_time() const { return extinction_time_; }

 private:
  std::vector<TraceRow> rows_;
  FlowStatus status_ = FlowStatus::running;
  double extinction_time_ = 0;
};

}  // namespace hypermcf
