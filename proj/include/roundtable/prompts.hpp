#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "roundtable/social_choice.hpp"

namespace roundtable {

enum class TemplateId {
    Initialization,
    MessagePhase,
    ProposalPhase,
    VotingPhase,
    EconomyTask,
    EconomyGoal,
    RatingTask,
    RatingGoal,
    DialogueActLabeling,
};

using TemplateVars = std::map<std::string, std::string, std::less<>>;

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw template text with {{name}} placeholders.
std::string_view template_text(TemplateId id);

/// Substitutes every {{name}}. Throws TemplateError naming the first unbound
/// variable. Unused bindings are ignored.
std::string render_template(TemplateId id, const TemplateVars& vars);
std::string render_template(std::string_view text, const TemplateVars& vars);

/// "Majority Voting", ...
std::string_view mechanism_title(Mechanism m);
/// The description agents are given for each mechanism.
std::string_view mechanism_description(Mechanism m);

/// Renders a phase prompt. For VotingPhase the mechanism-specific variables
/// (name, explanation, vote instruction, decision format) are bound from
/// `mechanism`; Initialization binds name and explanation the same way.
std::string render_prompt(TemplateId id, const TemplateVars& vars, Mechanism mechanism = Mechanism::Majority);

}  // namespace roundtable
