#include "dog/prompt.hpp"

#include "dog/error.hpp"
#include "dog/text.hpp"

namespace dog {

namespace {

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

const std::string& default_prompt_template() {
  static const std::string tmpl =
      "You are a helpful assistant that can analyse the knowledge graphs in the contexts and then answer "
      "the questions based on the knowledge graphs.\n"
      "The answers should give the grounded reasoning chains and think step by step, and the reasoning "
      "chains should be logically complete but have as fewer steps as possible. Do not include "
      "information irrelvant to the question.\n"
      "\n"
      "**Example 1:**\n"
      "\n"
      "Context: [ Bahamas -> location.country.first_level_divisions -> Grand Cay | Grand Bahama -> "
      "location.location.containedby -> Bahamas | Bahamas -> location.location.contains -> Grand Cay | "
      "Bahamas -> location.location.contains -> Grand Bahama | Grand Cay -> location.location.containedby "
      "-> Bahamas | Bahamas -> location.country.first_level_divisions -> East Grand Bahama | Bahamas -> "
      "location.country.first_level_divisions -> West Grand Bahama | Grand Bahama -> "
      "location.location.contains -> Grand Bahama International Airport | Bahamas -> "
      "location.location.contains -> East Grand Bahama | Bahamas -> location.location.contains -> West "
      "Grand Bahama | East Grand Bahama -> location.location.containedby -> Bahamas | Bahamas -> "
      "location.location.contains -> Grand Bahama International Airport | Grand Bahama -> "
      "location.location.people_born_here -> Hubert Ingraham | Grand Cay -> "
      "location.administrative_division.first_level_division_of -> Bahamas | Bahamas -> "
      "location.country.administrative_divisions -> Cat Island, Bahamas | Bahamas -> "
      "location.country.administrative_divisions -> Long Island | West Grand Bahama -> "
      "location.location.containedby -> Bahamas | Bahamas -> location.country.capital -> Nassau | "
      "Bahamas -> location.country.administrative_divisions -> Inagua | Bahamas -> "
      "location.country.administrative_divisions -> Exuma | Grand Bahama International Airport -> "
      "location.location.containedby -> Bahamas | Grand Bahama -> location.location.people_born_here -> "
      "Juan Lewis | Grand Bahama -> location.location.contains -> West End Airport ]\n"
      "\n"
      "Question: What country is the grand bahama island in?\n"
      "\n"
      "Answer: Let's break down the steps to find the answer to the question.\n"
      "\n"
      "1. < Grand Bahama -> location.location.containedby -> Bahamas > This tells us Grand Bahama is "
      "located in Bahamas.\n"
      "\n"
      "Grand Bahama is in Bahamas. Therefore, the answer is * Bahamas.\n"
      "\n"
      "**Example 1:**\n"
      "\n"
      "Context: [ William Shakespeare -> people.person.profession -> Playwright | William Shakespeare -> "
      "people.person.profession -> Poet | William Shakespeare -> base.kwebbase.kwtopic.has_sentences -> "
      "By the time these works were published in 1609, Shakespeare was an acknowledged master of drama "
      "and an established country gentleman. | William Shakespeare -> people.person.profession -> Actor | "
      "William Shakespeare -> people.person.profession -> Author | William Shakespeare -> "
      "people.person.profession -> Lyricist | In the 21 years between 1592 and 1613, Shakespeare produced "
      "more than 30 plays. -> base.kwebbase.kwsentence.previous_sentence -> Above all, his humanity "
      "spanned all classes and circumstances ]\n"
      "\n"
      "Question: What did William Shakespeare do for a living?\n"
      "\n"
      "Answer: Let's break down the steps to find the answer to the question.\n"
      "\n"
      "1. < William Shakespeare -> people.person.profession -> Playwright > This tells us William "
      "Shakespeare is was playwright.\n"
      "2. < William Shakespeare -> people.person.profession -> Poet > This tells us William Shakespeare "
      "was a poet.\n"
      "\n"
      "William Shakespeare was a playwright, and poet. Therefore, the answer is * playwright, and * poet.\n"
      "\n"
      "**Example 3:**\n"
      "\n"
      "Context: [ Carlton the Bear -> sports.mascot.team -> Toronto Maple Leafs | Toronto Maple Leafs -> "
      "sports.sports_team.team_mascot -> Carlton the Bear | Carlton the Bear -> "
      "common.topic.notable_types -> Mascot | Mascot -> type.type.properties -> Team | Toronto Maple "
      "Leafs -> sports.sports_team.previously_known_as -> Toronto St. Patricks | Team -> "
      "type.property.master_property -> Team Mascot | Toronto Maple Leafs -> "
      "sports.sports_team.previously_known_as -> Toronto Arenas | m.0crt465 -> "
      "sports.sports_league_participation.team -> Toronto Maple Leafs | Toronto St. Patricks -> "
      "sports.defunct_sports_team.later_known_as -> Toronto Maple Leafs | Toronto Maple Leafs -> "
      "sports.sports_team.sport -> Ice Hockey | Toronto St. Patricks -> sports.sports_team.sport -> Ice "
      "Hockey | Toronto Arenas -> sports.defunct_sports_team.later_known_as -> Toronto Maple Leafs | "
      "Toronto -> sports.sports_team_location.teams -> Toronto Maple Leafs | Toronto Maple Leafs -> "
      "sports.sports_team.location -> Toronto ]\n"
      "\n"
      "Question: What is the sport played by the team with a mascot known as Carlton the Bear?\n"
      "\n"
      "Answer: Let's break down the steps to find the answer to the question.\n"
      "\n"
      "1. < Carlton the Bear -> sports.mascot.team -> Toronto Maple Leafs > This tells us Carlton the "
      "Bear is the mascot of the team Toronto Maple Leafs.\n"
      "2. < Toronto Maple Leafs -> sports.sports_team.sport -> Ice Hockey > This tells us Toronto Maple "
      "Leafs plays Ice Hockey.\n"
      "\n"
      "Carlton the Bear is the mascot of the team Toronto Maple Leafs which plays Ice Hockey. Therefore, "
      "the answer is * Ice Hockey.\n"
      "\n"
      "**Example 4:**\n"
      "\n"
      "Context: {graph}\n"
      "\n"
      "Question: {question}\n"
      "\n"
      "Answer: Let's break down the steps to find the answer to the question.";
  return tmpl;
}

std::string build_prompt(const KnowledgeGraph& graph, std::string_view question,
                         std::string_view prompt_template) {
  for (auto slot : {kGraphSlot, kQuestionSlot}) {
    const std::size_t n = count_occurrences(prompt_template, slot);
    if (n != 1)
      throw TemplateError("template must contain " + std::string(slot) + " exactly once (found " +
                          std::to_string(n) + ")");
  }
  const std::string graph_text = linearize(graph);
  const std::string question_text = text::trim(question);

  std::string out(prompt_template);
  // Substitute the later slot first so the earlier offset stays valid.
  std::size_t g = out.find(kGraphSlot);
  std::size_t q = out.find(kQuestionSlot);
  if (g > q) {
    out.replace(g, kGraphSlot.size(), graph_text);
    out.replace(q, kQuestionSlot.size(), question_text);
  } else {
    out.replace(q, kQuestionSlot.size(), question_text);
    out.replace(g, kGraphSlot.size(), graph_text);
  }
  while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
  if (!out.ends_with(kAnswerPriming)) {
    out += "\n\n";
    out += kAnswerPriming;
  }
  return out;
}

}  // namespace dog
