#include "hypermcf/flow_trace.hpp"

#include "hypermcf/errors.hpp"

namespace hypermcf {

std::string_view to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::running: return "running";
    case FlowStatus::round_point: return "round_point";
    case FlowStatus::collapse_to_geodesic: return "collapse_to_geodesic";
    case FlowStatus::step_limit: return "step_limit";
  }
  return "unknown";
}

void FlowTrace::append(const TraceRow& row) {
  if (!rows_.empty() && !(row.t > rows_.back().t)) throw InvariantViolation("trace times must increase strictly");
  rows_.push_back(row);
}

void FlowTrace::finish(FlowStatus status, double extinction_time) {
  if (status_ != FlowStatus::running) throw InvariantViolation("trace status already set");
  if (status == FlowStatus::running) throw InvariantViolation("terminal status expected");
  status_ = status;
  extinction_time_ = extinction_time;
}

}  // namespace hypermcf
