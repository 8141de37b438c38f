#pragma once

#include <string>
#include <string_view>

#include "exloop/trajectory.hpp"

namespace exloop {

enum class DistillOutcome { Success, Failure };

// Literal marker tokens the distiller is instructed to emit; the output
// parser splits on them.
inline constexpr std::string_view kDescriptionSeparator = "{DESCRIPTION_PART_SEPARATOR}";
inline constexpr std::string_view kStructuredSeparator = "{STRUCTURED_PART_SEPARATOR}";

namespace prompts {

// Agent-facing instruction set for the online interaction loop.
inline constexpr std::string_view kSystemPrompt =
    "Answer the given question.\n"
    "\n"
    "You must conduct reasoning inside <think> and </think> first every time you get new "
    "information or get new experience principles.\n"
    "\n"
    "After reasoning, you can search for past experiences by <search_experience> query "
    "</search_experience> to get relevant past experience principles (may be guilding or "
    "warning principles) and it will return the top searched results between <experience> "
    "and </experience>.\n"
    "\n"
    "You can use these principles which you think is helpful to help you answer the "
    "question.\n"
    "\n"
    "If you find you lack some knowledge, you can call a search engine by <search_knowledge> "
    "query </search_knowledge> and it will return the top searched results between "
    "<information> and </information>.\n"
    "\n"
    "You can search knowledge and experience as many times as your want.\n"
    "\n"
    "If you find no further external knowledge needed, you can directly provide the answer "
    "inside <answer> and </answer>, without detailed illustrations.\n"
    "\n"
    "For example, <answer> Beijing </answer>\n"
    "\n"
    "User: {question}";

inline constexpr std::string_view kSuccessDistillPrompt =
    "You are an expert in analyzing interaction logs to distill generalizable wisdom.\n"
    "\n"
    "Analyze the following successful interaction trajectory. Your goal is to extract a "
    "\"Guiding Principle\" from it.\n"
    "\n"
    "A \"Guiding Principle\" has two parts:\n"
    "1. A concise, one-sentence natural language description. This is the core advice.\n"
    "2. A structured representation of the key steps or logic, as a list of simple "
    "(subject, predicate, object) triplets.\n"
    "\n"
    "[Trajectory Log]:\n"
    "\n"
    "{{trajectory_log}}\n"
    "Final Outcome: SUCCESS\n"
    "\n"
    "Your Task:\n"
    "Based on the trajectory, generate the Guiding Principle.\n"
    "First, on a new line, write {DESCRIPTION_PART_SEPARATOR}.\n"
    "Then, write the one-sentence description of the pitfall.\n"
    "Then, on a new line, write {STRUCTURED_PART_SEPARATOR}.\n"
    "Finally, provide the structured triplets describing the failure pattern in a valid "
    "JSON list format.\n"
    "\n"
    "[Example]:\n"
    "{DESCRIPTION_PART_SEPARATOR}\n"
    "When a file download fails with a 404 error, do not immediately retry the download; "
    "instead, verify the source URL's validity first.\n"
    "{STRUCTURED_PART_SEPARATOR}\n"
    "[\n"
    "    (file download, results_in, 404 error),\n"
    "    (immediate_retry, is, ineffective),\n"
    "    (correct_action, is, verify URL)\n"
    "]\n"
    "[Output]:";

inline constexpr std::string_view kFailureDistillPrompt =
    "You are an expert in analyzing interaction logs to find the root cause of failures.\n"
    "\n"
    "Analyze the following failed interaction trajectory. Your goal is to extract a "
    "\"Cautionary Principle\" from it.\n"
    "\n"
    "A \"Cautionary Principle\" has two parts:\n"
    "1. A concise, one-sentence description of the key mistake to avoid and under what "
    "circumstances.\n"
    "2. A structured representation of the failure pattern, as a list of simple "
    "(subject, predicate, object) triplets.\n"
    "\n"
    "[Trajectory Log]:\n"
    "\n"
    "{{trajectory_log}}\n"
    "\n"
    "Final Outcome: FAILURE\n"
    "\n"
    "Your Task:\n"
    "Based on the trajectory, generate the Cautionary Principle.\n"
    "First, on a new line, write {DESCRIPTION_PART_SEPARATOR}.\n"
    "Then, write the one-sentence description of the pitfall.\n"
    "Then, on a new line, write {STRUCTURED_PART_SEPARATOR}.\n"
    "Finally, provide the structured triplets describing the failure pattern in a valid "
    "JSON list format.\n"
    "\n"
    "[Example]:\n"
    "{DESCRIPTION_PART_SEPARATOR}\n"
    "When a file download fails with a 404 error, do not immediately retry the download; "
    "instead, verify the source URL's validity first.\n"
    "{STRUCTURED_PART_SEPARATOR}\n"
    "[\n"
    "    (file download, results_in, 404 error),\n"
    "    (immediate_retry, is, ineffective),\n"
    "    (correct_action, is, verify URL)\n"
    "]\n"
    "[Output]:";

inline constexpr std::string_view kJudgePrompt =
    "You are a semantic analysis expert. Determine if two principles describe the same core "
    "idea, even if they use different words.\n"
    "\n"
    "Principle A: \"{summary}\"\n"
    "Principle B: \"{existing_principle_description}\"\n"
    "\n"
    "Do Principle A and Principle B describe the same essential advice or warning?\n"
    "Please answer with only \"Yes\" or \"No\".";

inline std::string replace_once(std::string text, std::string_view placeholder,
                                std::string_view value) {
    const std::size_t pos = text.find(placeholder);
    if (pos != std::string::npos) text.replace(pos, placeholder.size(), value);
    return text;
}

}  // namespace prompts

inline std::string system_prompt(std::string_view question) {
    return prompts::replace_once(std::string(prompts::kSystemPrompt), "{question}", question);
}

inline std::string build_distill_prompt(const Trajectory& trajectory, DistillOutcome outcome) {
    const std::string_view tmpl = outcome == DistillOutcome::Success
                                      ? prompts::kSuccessDistillPrompt
                                      : prompts::kFailureDistillPrompt;
    return prompts::replace_once(std::string(tmpl), "{{trajectory_log}}",
                                 serialize_trajectory(trajectory));
}

inline std::string build_judge_prompt(std::string_view candidate, std::string_view existing) {
    std::string out = prompts::replace_once(std::string(prompts::kJudgePrompt), "{summary}",
                                            candidate);
    return prompts::replace_once(std::move(out), "{existing_principle_description}", existing);
}

}  // namespace exloop
