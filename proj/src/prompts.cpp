// Default prompt templates; kept identical to prompts/*.txt by a unit test.

#include "itin/llm.hpp"

namespace itin {

PromptSet PromptSet::defaults() {
  PromptSet p;
  p.set("next_type", R"tmpl(You are helping to plan a trip of {days} day(s). It is day {day}, {clock}, and the travellers are at {position}.

Traveller request:
{user_requirements}

Plan so far:
{current_plan}

Choose the kind of the next activity. Allowed answers: {options}.
Answer in exactly this format:
Thought: <one or two sentences>
Type: <answer>
)tmpl");
  p.set("nl2dsl", R"tmpl(Write constraint programs for the travel request below. Each program reads the
variable `plan` and returns True when the plan satisfies one requirement.

Language: assignments, `for x in ...:`, `if/elif/else`, `return`, arithmetic,
comparisons, `and`/`or`/`not`, list and set literals. No function definitions,
imports or method calls.

Functions you may call:
{concepts}

Request:
{user_requirements}
{feedback}
Reply with a single fenced code block. Start every program with a header line
`--- <short name>`.
)tmpl");
  p.set("rank_attractions", R"tmpl(You are helping to plan a trip of {days} day(s).

Traveller request:
{user_requirements}

Spent so far: {past_cost}

Candidate attractions (name | type | ticket price):
{attraction_info}

Pick the attractions that fit the request and order them from best to worst fit.
Answer in exactly this format:
Thought: <one or two sentences>
AttractionNameList: [<name>, <name>, ...]
)tmpl");
  p.set("rank_hotels", R"tmpl(You are helping to plan a trip of {days} day(s).

Traveller request:
{user_requirements}

Spent so far: {past_cost}

Candidate hotels (name | feature | price per room | beds per room):
{hotel_info}

Order the hotels from best to worst fit for the request.
Answer in exactly this format:
Thought: <one or two sentences>
HotelNameList: [<name>, <name>, ...]
)tmpl");
  p.set("rank_restaurants", R"tmpl(You are helping to plan a trip of {days} day(s).

Traveller request:
{user_requirements}

Spent so far: {past_cost}

Candidate restaurants (name | cuisine | price per person):
{restaurant_info}

Pick the restaurants that fit the request and order them from best to worst fit.
Answer in exactly this format:
Thought: <one or two sentences>
RestaurantNameList: [<name>, <name>, ...]
)tmpl");
  return p;
}

}  // namespace itin
