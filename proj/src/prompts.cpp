#include "roundtable/prompts.hpp"

namespace roundtable {
namespace {

constexpr std::string_view kInitialization =
    R"(# Agent Initialization
You are {{my_name}}, an agent in a recurring collaboration environment designed to address and solve complex problems.

# Task Description
{{task_description}}

# Collaboration Rules
You start with nothing decided. The intermediate result will be decided by the social choice function at the end of each round.
In each round, the collaboration runs in 3 phases with the following order:
1. Message Phase: At the beginning of each round, you can send one message to a shared channel for either Talking to one or more agents. All agents will send messages simultaneously. You will be able to see all messages from all agents after the end of the message phase.
2. Proposal Phase: After the end of the message phase, you will have the opportunity to propose potential solution. If you don't propose in this phase, your latest proposal will be used for voting.
3. Voting Phase: At the end of the round, all agents' latest proposal will be voted. When agents didn't propose in this round, their latest proposal will be used for voting. All votes will be processed with the social choice function: {{name_of_social_choice}}, where {{explanation_of_social_choice}}. If the social choice function selects a proposal, the intermediate result will be updated accordingly. After each round, each agent will be able to see the result of the vote from the previous round and the conversation history from all rounds.

The collaboration will run for {{max_rounds}} rounds. After the last round, the latest result will be the final result.

# Your Background
{{my_agent_background}}

# Game History
## Latest Candidates at Round {{latest_candidates_round}}:
{{latest_candidates}}

## Latest Voting Result at Round {{vote_history_length}}:
{{latest_vote_history}}

## Latest Approved Proposal:
Proposal {{latest_approved_proposal_id}} from Round {{latest_approved_proposal_round}}.

Proposal {{latest_approved_proposal_id}} Detail:
{{latest_approved_proposal_detail}}

## Conversation History until Round {{conversation_history_length}}:
{{conversation_history}})";

constexpr std::string_view kMessagePhase =
    R"(You are {{my_name}}, currently in the message phase of round {{round_num}}. In this phase, you can:
1. Answer questions posed by others.
2. Share your findings or insights.
3. Ask questions to further the discussion.
You may engage in multiple activities using multiple sentences.

Please type your message in the following JSON format: {"target": <list of agent names>, "message": <str, your message>}
Don't generate anything except the JSON format.)";

constexpr std::string_view kProposalPhase =
    R"(You are {{my_name}}, currently in the proposal phase of round {{round_num}}. You have an opportunity to make a proposal of the potential solution. Whether or not you submit a new proposal, your latest proposal will be considered as a candidate proposal for the voting phase.

You have two options:
1. Make a proposal:
    - You can propose a potential solution by the provided format.
2. Do not make a proposal:
    - If you do not want to propose a solution, you can return None as your proposal.

Please type your proposal in the following JSON format: {"reason_for_decision": <your step by step reasoning for your decision>, "proposal": {{proposal_format_text}}, or None}
Don't generate anything except the JSON format.
)";

constexpr std::string_view kVotingPhase =
    R"(You are {{my_name}}, at the voting phase at round {{round_num}}.
In this phase, all agents' latest proposal will be voted by {{name_of_social_choice}}, where {{explanation_of_social_choice}}. If the social choice function selects a proposal, the intermediate result will be updated accordingly.

You have two actions to choose: vote or not vote.
1. For vote:
    - {{vote_instruction}}
2. For not vote:
    - You should vote None.
    - If you do not want to vote for any of the proposals, you can vote None.
    - If there is no proposal, you vote None.

The same proposal proposed by multiple agents will be merged as one proposal.
If there are multiple proposals passed, none of the proposals will be selected.
If no proposals are passed, the current intermediate result will be kept.

The current candidate proposals are as follows:
{{proposal_list}}

What is your vote? Please answer in the following JSON format: {"reason_for_decision": <your step by step reasoning for your decision>, "decision": {{decision_format}}}
Don't generate anything except the JSON format.)";

constexpr std::string_view kEconomyTask =
    R"(You will collaborate with other agents in a recurring exchange market game.
There are {{num_of_agents}} agents in this market: {{list_of_agents}}.
There are {{num_of_goods}} goods in the market: {{list_of_goods}}. Total quantity of each good is as follows: {{total_num_of_goods}}.
In this game, you will collaboratively decide how to distribute the goods among the agents. Your goal is to maximize your own utility function.)";

constexpr std::string_view kEconomyGoal =
    R"(Your goal is to maximize your individual utility function by communicating, proposing, and voting with other agents. Your utility function is {{util_func}})";

constexpr std::string_view kRatingTask =
    R"(You will collaborate with other agents in a movie recommendation game.
In this game, you will collaboratively predict the rating of a target movie ({{target_movie_title}}) for a target user.
There are 3 agents in this game: BasicInfo Agent, MovieHistory Agent, UserHistory Agent.
1. BasicInfo Agent has access to the basic information of the target movie and target user. It has access to the data with the following schema:
{{movie_info_schema}}
{{user_info_schema}}
2. MovieHistory Agent has access to the rating history of the target movie from other people. It has access to the data with the following schema:
{{movie_rating_history_schema}}
3. UserHistory Agent has access to the rating history of the target user to other movies. It has access to the data with the following schema:
{{user_rating_history_schema}}

You can't see other agents' information directly, but you can get information from other agents through communication. Your goal is to predict the rating a target user would give to {{target_movie_title}}. Utilize all available information about both the user and the movie to make the most accurate prediction possible. You only have access to partial information, but you can communicate with other agents to get more information.)";

constexpr std::string_view kRatingGoal =
    R"(Your goal is to predict the rating the target user would give to the target movie. Utilize all available information about both the user and the movie to make the most accurate prediction possible. You only have access to {{data_access}}, but you can communicate with other agents to get more information.

# Your Data:
{{agent_dataset}})";

constexpr std::string_view kDialogueActLabeling =
    R"(You are annotating the dialogue acts of one message from a multi-agent collaboration.

Conversation Acts (Informational):
- Inform - Shares new information that wasn't previously known.
- Request - Asks for information that the speaker doesn't have.
- Confirm - Asks to verify or validate shared information.
- Summarize - Provides a brief overview of the main points.
- Evaluate - Gives an opinion or judgment about the information.

Collaboration Acts (Decision-Making):
- Propose - Introduce a new solution in the discussion.
- Compromise - Offers a balanced solution that incorporates parts of different parties' preferences.
- Defend - Maintain support for an idea or solution after consideration or challenge.
- Accept - Agrees to or accept an idea or solution.
- Decline - Refuses or disagrees with an idea or solution.

If none of the acts apply, answer Others.

# Messages from the previous round:
{{previous_round}}

# Target message from {{speaker}}:
{{message}}

Answer with a comma-separated list of every dialogue act that applies to the target message. Don't generate anything except the list.)";

}  // namespace

std::string_view template_text(TemplateId id) {
    switch (id) {
        case TemplateId::Initialization: return kInitialization;
        case TemplateId::MessagePhase: return kMessagePhase;
        case TemplateId::ProposalPhase: return kProposalPhase;
        case TemplateId::VotingPhase: return kVotingPhase;
        case TemplateId::EconomyTask: return kEconomyTask;
        case TemplateId::EconomyGoal: return kEconomyGoal;
        case TemplateId::RatingTask: return kRatingTask;
        case TemplateId::RatingGoal: return kRatingGoal;
        case TemplateId::DialogueActLabeling: return kDialogueActLabeling;
    }
    throw TemplateError("unknown template id");
}

std::string render_template(std::string_view text, const TemplateVars& vars) {
    std::string out;
    out.reserve(text.size() * 2);
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t open = text.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        const std::size_t close = text.find("}}", open + 2);
        if (close == std::string_view::npos) throw TemplateError("unterminated placeholder in template");
        out.append(text.substr(pos, open - pos));
        const std::string_view name = text.substr(open + 2, close - open - 2);
        auto it = vars.find(name);
        if (it == vars.end()) throw TemplateError("unbound template variable '" + std::string(name) + "'");
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

std::string render_template(TemplateId id, const TemplateVars& vars) {
    return render_template(template_text(id), vars);
}

std::string_view mechanism_title(Mechanism m) {
    switch (m) {
        case Mechanism::Unanimous: return "Unanimous Voting";
        case Mechanism::Majority: return "Majority Voting";
        case Mechanism::Plurality: return "Plurality Voting";
        case Mechanism::Rated: return "Rated Voting";
        case Mechanism::Ranked: return "Ranked Voting";
        case Mechanism::Cumulative: return "Cumulative Voting";
    }
    return "?";
}

std::string_view mechanism_description(Mechanism m) {
    switch (m) {
        case Mechanism::Unanimous:
            return "The proposal that receives votes from all agents will be selected. If no proposal receives "
                   "votes from all agents, no proposal will be selected.";
        case Mechanism::Majority:
            return "The proposal that receives votes from more than half of all agents will be selected. If no "
                   "proposal meets this condition, none will be selected.";
        case Mechanism::Plurality: return "The proposal that receives the most votes will be selected.";
        case Mechanism::Rated:
            return "Each agent assigns ratings on a 5-point Likert scale to all candidate proposals, with 1 being "
                   "the lowest and 5 being the highest. The proposal with the highest total score will be selected.";
        case Mechanism::Ranked:
            return "Each agent ranks all candidate proposals from the most preferred to the least preferred. Social "
                   "Choice will assign 1, 1/2, 1/3... points to the 1st, 2nd, 3rd... candidates on each ballot. The "
                   "proposal with the highest total points will be selected.";
        case Mechanism::Cumulative:
            return "For X candidate proposals, each agent is given X points to distribute among the proposals as "
                   "they see fit. The proposal with the highest total points will be selected.";
    }
    return "?";
}

namespace {

std::string vote_instruction(Mechanism m, const TemplateVars& vars) {
    switch (m) {
        case Mechanism::Unanimous:
        case Mechanism::Majority:
        case Mechanism::Plurality: return "You can only vote for one of the proposals from the candidate list.";
        case Mechanism::Rated:
            return "You must rate every proposal from the candidate list with an integer from 1 to 5.";
        case Mechanism::Ranked:
            return "You must rank every proposal from the candidate list from the most preferred to the least "
                   "preferred.";
        case Mechanism::Cumulative: {
            auto it = vars.find("points");
            if (it == vars.end()) throw TemplateError("unbound template variable 'points'");
            return "You must distribute exactly " + it->second +
                   " points among the proposals from the candidate list.";
        }
    }
    return {};
}

std::string decision_format(Mechanism m, const TemplateVars& vars) {
    switch (m) {
        case Mechanism::Unanimous:
        case Mechanism::Majority:
        case Mechanism::Plurality: return "<id of the proposal from the candidates you want to vote, or None>";
        case Mechanism::Rated:
            return "<{\"id of the proposal\": rating from 1 to 5} for every candidate, or None>";
        case Mechanism::Ranked:
            return "<list of every proposal id from the most preferred to the least preferred, or None>";
        case Mechanism::Cumulative:
            return "<{\"id of the proposal\": points} with points summing to " + vars.at("points") + ", or None>";
    }
    return {};
}

}  // namespace

std::string render_prompt(TemplateId id, const TemplateVars& vars, Mechanism mechanism) {
    if (id != TemplateId::VotingPhase && id != TemplateId::Initialization) return render_template(id, vars);
    TemplateVars bound = vars;
    bound.insert_or_assign("name_of_social_choice", std::string(mechanism_title(mechanism)));
    bound.insert_or_assign("explanation_of_social_choice", std::string(mechanism_description(mechanism)));
    if (id == TemplateId::VotingPhase) {
        bound.insert_or_assign("vote_instruction", vote_instruction(mechanism, vars));
        bound.insert_or_assign("decision_format", decision_format(mechanism, vars));
    }
    return render_template(id, bound);
}

}  // namespace roundtable
