#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "korrontea/error.hpp"

namespace korrontea {

// Ticks of a local physical clock. All sites share the same rate, so tick
// differences are comparable across sites while absolute values are not.
using Tick = std::int64_t;
using SequenceNumber = std::uint32_t;

class SiteId {
 public:
  explicit SiteId(std::string id);

  const std::string& str() const noexcept { return id_; }

  friend bool operator==(const SiteId&, const SiteId&) = default;
  friend auto operator<=>(const SiteId&, const SiteId&) = default;

 private:
  std::string id_;
};

enum class TemporalConstraint { kHard, kSoft };

std::string_view to_string(TemporalConstraint c);

struct FlowDescriptor {
  std::string flow_id;
  std::string source_id;
  SiteId site;
  TemporalConstraint constraint = TemporalConstraint::kHard;
  std::string coding_format;
  // Empty for irregular flows.
  std::optional<Tick> nominal_period;

  friend bool operator==(const FlowDescriptor&, const FlowDescriptor&) = default;
};

// The coding format of a sample is the coding_format of its flow.
struct Sample {
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct InformationUnit {
  std::string flow_id;
  SequenceNumber sequence_number = 1;
  std::vector<Sample> samples;

  friend bool operator==(const InformationUnit&, const InformationUnit&) = default;
};

struct SynchronousSlice {
  Tick time_stamp = 0;
  SiteId site;
  // flow_id -> units of that flow, numbered 1..n inside this slice.
  std::map<std::string, std::vector<InformationUnit>> units;

  std::size_t unit_count() const;

  friend bool operator==(const SynchronousSlice&, const SynchronousSlice&) = default;
};

// Position of an information unit inside one synchronous flow.
struct UnitPosition {
  Tick time_stamp = 0;
  SequenceNumber sequence_number = 0;
};

std::strong_ordering compare_units(UnitPosition a, UnitPosition b);
std::strong_ordering compare_slices(const SynchronousSlice& a, const SynchronousSlice& b);

enum class ViolationKind {
  kEmptySlice,
  kEmptyFlow,
  kEmptyUnit,
  kFlowKeyMismatch,
  kSequenceGap,
  kDuplicateSequence,
  kSiteMismatch,
};

struct SliceViolation {
  ViolationKind kind;
  std::string flow_id;
  std::string message;
};

// Reports every broken slice invariant. Site consistency is checked against
// `flows` for each flow key that has a descriptor there.
std::vector<SliceViolation> validate_slice(const SynchronousSlice& slice,
                                           std::span<const FlowDescriptor> flows = {});

// Ordered sequence of slices over a fixed flow set located on one site.
class SynchronousFlowHistory {
 public:
  SynchronousFlowHistory(SiteId site, std::vector<FlowDescriptor> flow_set);

  // Throws kInvalidHistory unless the slice is valid, belongs to this site,
  // only uses flows of the flow set and is strictly later than the last one.
  void append(SynchronousSlice slice);

  const SiteId& site() const noexcept { return site_; }
  const std::vector<FlowDescriptor>& flow_set() const noexcept { return flow_set_; }
  const std::vector<SynchronousSlice>& slices() const noexcept { return slices_; }
  bool empty() const noexcept { return slices_.empty(); }
  std::size_t size() const noexcept { return slices_.size(); }

  bool is_primitive() const noexcept { return flow_set_.size() == 1; }
  bool is_composed() const noexcept { return flow_set_.size() > 1; }

  const FlowDescriptor* find_flow(std::string_view flow_id) const;

  friend bool operator==(const SynchronousFlowHistory&, const SynchronousFlowHistory&) = default;

 private:
  SiteId site_;
  std::vector<FlowDescriptor> flow_set_;  // sorted by flow_id
  std::vector<SynchronousSlice> slices_;
};

// Immediate neighbours of `slice` in `history`; nullptr at either end.
const SynchronousSlice* prev(const SynchronousFlowHistory& history, const SynchronousSlice& slice);
const SynchronousSlice* next(const SynchronousFlowHistory& history, const SynchronousSlice& slice);

Tick time_interval(const SynchronousSlice& a, const SynchronousSlice& b);

// Hard iff every gap between consecutive slices is <= theta.
TemporalConstraint check_constraint(const SynchronousFlowHistory& history, Tick theta);

}  // namespace korrontea
