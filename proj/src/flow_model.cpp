#include "korrontea/flow_model.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace korrontea {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidHistory: return "InvalidHistory";
    case ErrorCode::kSliceNotInHistory: return "SliceNotInHistory";
    case ErrorCode::kCrossSiteComparison: return "CrossSiteComparison";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kTimeReversal: return "TimeReversal";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kNoQualifyingSlice: return "NoQualifyingSlice";
    case ErrorCode::kFlowWithoutQualifyingSlice: return "FlowWithoutQualifyingSlice";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kMixedSites: return "MixedSites";
    case ErrorCode::kUnknownFlow: return "UnknownFlow";
    case ErrorCode::kNonMonotonicStamps: return "NonMonotonicStamps";
    case ErrorCode::kEventAfterEnd: return "EventAfterEnd";
    case ErrorCode::kEmptyConsumption: return "EmptyConsumption";
    case ErrorCode::kAlreadyPrimitive: return "AlreadyPrimitive";
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kSequenceGap: return "SequenceGap";
    case ErrorCode::kChannelClosed: return "ChannelClosed";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kTraceSyntaxError: return "TraceSyntaxError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

SiteId::SiteId(std::string id) : id_(std::move(id)) {
  if (id_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "site id must not be empty");
  }
}

std::string_view to_string(TemporalConstraint c) {
  return c == TemporalConstraint::kHard ? "hard" : "soft";
}

std::size_t SynchronousSlice::unit_count() const {
  std::size_t n = 0;
  for (const auto& [_, list] : units) n += list.size();
  return n;
}

std::strong_ordering compare_units(UnitPosition a, UnitPosition b) {
  if (auto c = a.time_stamp <=> b.time_stamp; c != 0) return c;
  return a.sequence_number <=> b.sequence_number;
}

std::strong_ordering compare_slices(const SynchronousSlice& a, const SynchronousSlice& b) {
  return a.time_stamp <=> b.time_stamp;
}

std::vector<SliceViolation> validate_slice(const SynchronousSlice& slice,
                                           std::span<const FlowDescriptor> flows) {
  std::vector<SliceViolation> out;
  if (slice.unit_count() == 0) {
    out.push_back({ViolationKind::kEmptySlice, "", "slice carries no information unit"});
  }
  for (const auto& [flow_id, list] : slice.units) {
    if (list.empty()) {
      out.push_back({ViolationKind::kEmptyFlow, flow_id,
                     fmt::format("flow {} is present without units", flow_id)});
      continue;
    }
    std::vector<SequenceNumber> seqs;
    seqs.reserve(list.size());
    for (const auto& unit : list) {
      if (unit.flow_id != flow_id) {
        out.push_back({ViolationKind::kFlowKeyMismatch, flow_id,
                       fmt::format("unit of flow {} stored under {}", unit.flow_id, flow_id)});
      }
      if (unit.samples.empty()) {
        out.push_back({ViolationKind::kEmptyUnit, flow_id,
                       fmt::format("unit {} of {} has no sample", unit.sequence_number, flow_id)});
      }
      seqs.push_back(unit.sequence_number);
    }
    std::sort(seqs.begin(), seqs.end());
    auto dup = std::adjacent_find(seqs.begin(), seqs.end());
    if (dup != seqs.end()) {
      out.push_back({ViolationKind::kDuplicateSequence, flow_id,
                     fmt::format("duplicate sequence number {} in {}", *dup, flow_id)});
    }
    seqs.erase(std::unique(seqs.begin(), seqs.end()), seqs.end());
    // Distinct numbers must be exactly 1..k.
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      if (seqs[i] != i + 1) {
        out.push_back({ViolationKind::kSequenceGap, flow_id,
                       fmt::format("gap in sequence numbers of {}", flow_id)});
        break;
      }
    }
    for (const auto& d : flows) {
      if (d.flow_id == flow_id && d.site != slice.site) {
        out.push_back({ViolationKind::kSiteMismatch, flow_id,
                       fmt::format("flow {} is located on {} but slice is on {}", flow_id,
                                   d.site.str(), slice.site.str())});
      }
    }
  }
  return out;
}

SynchronousFlowHistory::SynchronousFlowHistory(SiteId site, std::vector<FlowDescriptor> flow_set)
    : site_(std::move(site)), flow_set_(std::move(flow_set)) {
  std::sort(flow_set_.begin(), flow_set_.end(),
            [](const auto& a, const auto& b) { return a.flow_id < b.flow_id; });
  for (std::size_t i = 0; i < flow_set_.size(); ++i) {
    if (i > 0 && flow_set_[i].flow_id == flow_set_[i - 1].flow_id) {
      throw Error(ErrorCode::kInvalidHistory,
                  fmt::format("flow {} listed twice", flow_set_[i].flow_id));
    }
    if (flow_set_[i].site != site_) {
      throw Error(ErrorCode::kMixedSites,
                  fmt::format("flow {} is not located on {}", flow_set_[i].flow_id, site_.str()));
    }
  }
}

const FlowDescriptor* SynchronousFlowHistory::find_flow(std::string_view flow_id) const {
  auto it = std::lower_bound(flow_set_.begin(), flow_set_.end(), flow_id,
                             [](const FlowDescriptor& d, std::string_view id) { return d.flow_id < id; });
  return it != flow_set_.end() && it->flow_id == flow_id ? &*it : nullptr;
}

void SynchronousFlowHistory::append(SynchronousSlice slice) {
  if (slice.site != site_) {
    throw Error(ErrorCode::kInvalidHistory,
                fmt::format("slice from {} appended to a flow of {}", slice.site.str(), site_.str()));
  }
  for (const auto& [flow_id, _] : slice.units) {
    if (find_flow(flow_id) == nullptr) {
      throw Error(ErrorCode::kInvalidHistory, fmt::format("flow {} is not in the flow set", flow_id));
    }
  }
  if (auto v = validate_slice(slice, flow_set_); !v.empty()) {
    throw Error(ErrorCode::kInvalidHistory, v.front().message);
  }
  if (!slices_.empty() && slice.time_stamp <= slices_.back().time_stamp) {
    throw Error(ErrorCode::kInvalidHistory,
                fmt::format("time stamp {} does not follow {}", slice.time_stamp,
                            slices_.back().time_stamp));
  }
  slices_.push_back(std::move(slice));
}

namespace {

std::size_t index_of(const SynchronousFlowHistory& history, const SynchronousSlice& slice) {
  const auto& all = history.slices();
  auto it = std::lower_bound(all.begin(), all.end(), slice.time_stamp,
                             [](const SynchronousSlice& s, Tick t) { return s.time_stamp < t; });
  if (it == all.end() || !(*it == slice)) {
    throw Error(ErrorCode::kSliceNotInHistory,
                fmt::format("no slice with time stamp {} in history", slice.time_stamp));
  }
  return static_cast<std::size_t>(it - all.begin());
}

}  // namespace

const SynchronousSlice* prev(const SynchronousFlowHistory& history, const SynchronousSlice& slice) {
  std::size_t i = index_of(history, slice);
  return i == 0 ? nullptr : &history.slices()[i - 1];
}

const SynchronousSlice* next(const SynchronousFlowHistory& history, const SynchronousSlice& slice) {
  std::size_t i = index_of(history, slice);
  return i + 1 == history.size() ? nullptr : &history.slices()[i + 1];
}

Tick time_interval(const SynchronousSlice& a, const SynchronousSlice& b) {
  if (a.site != b.site) {
    throw Error(ErrorCode::kCrossSiteComparison,
                fmt::format("stamps of {} and {} cannot be compared", a.site.str(), b.site.str()));
  }
  return b.time_stamp >= a.time_stamp ? b.time_stamp - a.time_stamp : a.time_stamp - b.time_stamp;
}

TemporalConstraint check_constraint(const SynchronousFlowHistory& history, Tick theta) {
  if (theta <= 0) throw Error(ErrorCode::kInvalidArgument, "theta must be positive");
  if (history.size() < 2) {
    throw Error(ErrorCode::kInsufficientHistory, "at least two slices are needed");
  }
  const auto& s = history.slices();
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (time_interval(s[i - 1], s[i]) > theta) return TemporalConstraint::kSoft;
  }
  return TemporalConstraint::kHard;
}

}  // namespace korrontea
