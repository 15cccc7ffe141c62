#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace toolsim {

enum class MetaTaskKind {
  Effect,
  DecisionMaking,
  Reversion,
  InputBoundary,
  OutputBoundary,
  Counterfact,
};

constexpr int kMetaTaskCount = 6;

const char* to_string(MetaTaskKind kind);
MetaTaskKind meta_task_from_string(const std::string& s);
const std::vector<MetaTaskKind>& all_meta_tasks();

// QA template. Question patterns carry named slots ({state}, {action},
// {outcome}, {alt_action}, {alt_outcome}, {label}); answer patterns are the
// bare canonical value so answers stay machine-checkable.
struct Template {
  std::string id;
  MetaTaskKind kind;
  std::string question_pattern;
  std::string answer_pattern;
};

// Built-in hand-authored set, 5 per meta-task.
const std::vector<Template>& default_templates();

// One JSON object per line: {"id","meta_task","question_pattern","answer_pattern"}.
std::vector<Template> load_templates(const std::string& path);

std::vector<Template> templates_for(const std::vector<Template>& all, MetaTaskKind kind);
const Template* find_template(const std::vector<Template>& all, const std::string& id);

using SlotMap = std::map<std::string, std::string>;

// Replaces {slot} markers with values; unknown markers are left untouched.
std::string fill_slots(const std::string& pattern, const SlotMap& slots);

// Inverse of fill_slots: matches `text` against `pattern` and extracts the
// slot values. Requires non-empty literal text between consecutive slots.
std::optional<SlotMap> invert_slots(const std::string& pattern, const std::string& text);

}  // namespace toolsim
