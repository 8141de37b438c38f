#pragma once

// Canonical multi-hop rollout used across suites: five reasoning steps, one
// experience lookup, three knowledge searches, answered "Kate Warne".

inline constexpr const char* kGoldenRollout =
    R"(<think>The question asks which woman was the detective agency's first female detective, so prior strategies about first-person-in-role lookups may apply.</think>
<search_experience>first woman to hold a named role inside a historical organization</search_experience>
<experience>[Principle 0], type: guiding, metric score: 0.67, description: To identify the first woman in a named organizational role, anchor the organization first, then search for the person tied to that milestone.</experience>
<think>The guidance says to anchor the organization and then look for the person, so the corpus should confirm a name.</think>
<search_knowledge>pinkerton detective agency first female detective</search_knowledge>
<information>Doc 1(Title: "Kate Warne") Kate Warne joined the Pinkerton National Detective Agency in 1856 and is regarded as the first female detective hired by the agency.
Doc 2(Title: "Private investigator") A private investigator undertakes investigatory work for clients.
Doc 3(Title: "Pinkerton National Detective Agency") The agency was founded by Allan Pinkerton in 1850.</information>
<think>The documents point at Kate Warne; one more pass against the agency history should corroborate it.</think>
<search_knowledge>kate warne pinkerton agency 1856</search_knowledge>
<information>Doc 1(Title: "Kate Warne") Kate Warne joined the agency in 1856 and worked undercover on fraud and conspiracy cases.
Doc 2(Title: "Allan Pinkerton") Allan Pinkerton led the agency that bears his name.
Doc 3(Title: "Private investigator") Detective agencies employed operatives for surveillance.</information>
<think>Both passes agree on the same person; confirming the hiring year closes the loop.</think>
<search_knowledge>first female detective hired 1856</search_knowledge>
<information>Doc 1(Title: "Kate Warne") She joined in 1856, becoming the first woman detective at the agency.
Doc 2(Title: "World's fair") A world's fair is a large global exhibition.
Doc 3(Title: "Paris") Paris hosted several world fairs.</information>
<think>Everything is consistent, so the answer is settled.</think>
<answer>Kate Warne</answer>)";

inline constexpr const char* kGoldenAnswer = "Kate Warne";
