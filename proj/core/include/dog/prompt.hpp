#pragma once

#include <string>
#include <string_view>

#include "dog/kg_store.hpp"

namespace dog {

inline constexpr std::string_view kGraphSlot = "{graph}";
inline constexpr std::string_view kQuestionSlot = "{question}";
inline constexpr std::string_view kAnswerPriming =
    "Answer: Let's break down the steps to find the answer to the question.";

// Three-shot instruction prompt with {graph} and {question} slots. The
// {graph} slot receives the bracketed linearization, so the template writes
// "Context: {graph}".
const std::string& default_prompt_template();

// Substitutes both slots (each must occur exactly once, otherwise
// dog::TemplateError) and makes sure the result ends with kAnswerPriming.
std::string build_prompt(const KnowledgeGraph& graph, std::string_view question,
                         std::string_view prompt_template);

}  // namespace dog
