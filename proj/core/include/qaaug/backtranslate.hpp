#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qaaug/dataset.hpp"
#include "qaaug/provider.hpp"

namespace qaaug {

enum class BtTarget { question, snippet };

std::string_view to_string(BtTarget target);
BtTarget bt_target_from_string(std::string_view name);

struct BtConfig {
  std::vector<std::string> pivots{"fr"};
  std::vector<BtTarget> targets{BtTarget::question, BtTarget::snippet};
  MatchMode answer_match = MatchMode::casefold;
  std::string source_language = "en";
  unsigned jobs = 1;
};

/// Throws ConfigError when pivots or targets are empty.
void validate(const BtConfig& config);

enum class BtStatus { produced, identical, answer_lost, provider_error };

struct BtResult {
  std::optional<Triple> triple;
  BtStatus status = BtStatus::identical;
};

/// Round-trips the target field through `pivot`. A rewritten snippet gets
/// its spans re-located; no triple comes back when the answer cannot be
/// found, when the result equals the original up to whitespace, or when
/// the provider fails.
BtResult backtranslate_triple(const Triple& triple, const std::string& pivot, BtTarget target, Gateway& gateway,
                              const BtConfig& config = {}, std::size_t ordinal = 0);

/// At most one triple per (triple, pivot, target). Results equal (up to
/// whitespace) to an original or an earlier artificial triple are dropped.
/// Ordered by (parent id, pivot, target). meta: generated, deduped,
/// identical, answer_lost, skipped.
Dataset augment_bt(const Dataset& dataset, Gateway& gateway, const BtConfig& config = {});

}  // namespace qaaug
