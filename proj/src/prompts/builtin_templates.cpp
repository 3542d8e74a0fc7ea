// Frozen few-shot prompt bodies. The checksum test in
// tests/unit/prompts_test.cpp fails on any edit here; data/prompts/ mirrors
// these texts byte for byte.

#include "builtin_templates.hpp"

namespace presuppose::prompts::builtin {

const std::string_view kTransform =
    "You will be provided with a question. Your task is to transform the question into a "
    "statement and keep its original meaning.\n"
    "\n"
    "Question: How do hashing functions avoid collisions?\n"
    "Statement: Hashing functions can avoid collisions.\n"
    "\n"
    "Question: Who is the only Indian to win the Oscar for music?\n"
    "Statement: Only one Indian has won the Oscar for music.\n"
    "\n"
    "Question: Why have our bodies arrived at 98.6F as the \"normal\" body temperature?\n"
    "Statement: 98.6F is the \"normal\" body temperature.\n"
    "\n"
    "Question: What kind of meat can be made into soybean milk?\n"
    "Statement: Soybean milk can be made from meat.\n"
    "\n"
    "Question: {question}\n"
    "Statement:";

const std::string_view kIdentifyPlainQuestion =
    "You are a helpful assistant that helps identify false assumptions. Output Yes if the "
    "question has false assumptions; otherwise, output No.\n"
    "\n"
    "Input: How do betta fish survive without oxygen?\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer: Yes\n"
    "\n"
    "Input: Who is the Duke of Oxford?\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer: No\n"
    "\n"
    "Input: Where does the Flint River in Georgia start and end?\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer: No\n"
    "\n"
    "Input: Who is the movie Jersey based on?\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer: Yes\n"
    "\n"
    "Input: {input}\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer:";

const std::string_view kIdentifyPlainStatement =
    "You are a helpful assistant that helps identify false assumptions. Output Yes if the "
    "statement has false assumptions; otherwise, output No.\n"
    "\n"
    "Input: Betta fish can survive without oxygen.\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer: Yes\n"
    "\n"
    "Input: There exists the Duke of Oxford.\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer: No\n"
    "\n"
    "Input: The Flint River in Georgia start and end in someplace.\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer: No\n"
    "\n"
    "Input: The movie Jersey is based on someone.\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer: Yes\n"
    "\n"
    "Input: {input}\n"
    "Question: Does the input contain any false assumptions?\n"
    "Answer:";

const std::string_view kIdentifyWithEvidence =
    "You are a helpful assistant that helps identify false assumptions in {input_kind}. Use "
    "the information from the evidence to help you identify the false assumption. Output Yes "
    "if the {input_kind} has false assumptions; otherwise, output No.\n"
    "\n"
    "Input: Why can't we vote online? It seems ridiculous we have to drive to do such a "
    "simple and important task.\n"
    "Evidence: Many countries have looked into Internet voting as a possible solution for low "
    "voter turnout. Some countries like France and Switzerland use Internet voting.\n"
    "Question: Considering the external knowledge from the Evidence, does the input contain "
    "any false assumptions?\n"
    "Answer: Yes\n"
    "\n"
    "Input: Why are trees susceptible to lightning strikes?\n"
    "Evidence: Direct strike casualties could be much higher than reported numbers. Trees are "
    "frequent conductors of lightning to the ground.\n"
    "Question: Considering the external knowledge from the Evidence, does the input contain "
    "any false assumptions?\n"
    "Answer: No\n"
    "\n"
    "Input: Why does a bad throat often turn to common cold?\n"
    "Evidence: The distinction between viral upper respiratory tract infections is loosely "
    "based on the location of symptoms with the common cold affecting primarily the nose, "
    "pharyngitis (the throat), and bronchitis (the lungs).\n"
    "Question: Considering the external knowledge from the Evidence, does the input contain "
    "any false assumptions?\n"
    "Answer: Yes\n"
    "\n"
    "Input: Why does clear plastic turn opaque and white when bent?\n"
    "Evidence: Stress-whitening is where a white line appears along a bend or curve when a "
    "material is stressed by bending or punching operations.\n"
    "Question: Considering the external knowledge from the Evidence, does the input contain "
    "any false assumptions?\n"
    "Answer: Yes\n"
    "\n"
    "Input: {input}\n"
    "Evidence: {evidence}\n"
    "Question: Considering the external knowledge from the Evidence, does the input contain "
    "any false assumptions?\n"
    "Answer:";

const std::string_view kGenerateKnowledge =
    "Generate some knowledge about the input.\n"
    "\n"
    "Input: Greece is larger than Mexico.\n"
    "Knowledge: Greece is approximately 131,957 sq km, while Mexico is approximately "
    "1,964,375 sq km, making Mexico 1,389% larger than Greece.\n"
    "\n"
    "Input: A fish is capable of thinking.\n"
    "Knowledge: Fish are more intelligent than they appear. In many areas, such as memory, "
    "their cognitive powers match or exceed those of 'higher' vertebrates including non-human "
    "primates.\n"
    "\n"
    "Input: A common effect of smoking lots of cigarettes in one's lifetime is a higher than "
    "normal chance of getting lung cancer.\n"
    "Knowledge: Those who consistently averaged less than one cigarette per day over their "
    "lifetime had nine times the risk of dying from lung cancer than never smokers. Among "
    "people who smoked between one and 10 cigarettes per day, the risk of dying from lung "
    "cancer was nearly 12 times higher than that of never smokers.\n"
    "\n"
    "Input: A rock is the same size as a pebble.\n"
    "Knowledge: A pebble is a clast of rock with a particle size of 4 to 64 millimeters based "
    "on the Udden-Wentworth scale of sedimentology. Pebbles are generally considered larger "
    "than granules (2 to 4 millimeters diameter) and smaller than cobbles (64 to 256 "
    "millimeters diameter).\n"
    "\n"
    "Input: {input}\n"
    "Knowledge:";

const std::string_view kAtomicGenerate =
    "You are a helpful assistant. Help me understand the question by extracting both explicit "
    "and implicit atomic assumptions. You must notice that considering the intention of the "
    "question asker is helpful for extracting a hidden assumption. Output every atomic "
    "assumption in a complete sentence.\n"
    "\n"
    "Question: When did the great depression begin before world war 1?\n"
    "Let us think step by step,the atomic assumptions are:\n"
    "(1) There was a period called the Great Depression.\n"
    "(2) There was a conflict called World War 1.\n"
    "(3) The Great Depression began before World War 1.\n"
    "\n"
    "Question: How do betta fish survive without oxygen?\n"
    "Let us think step by step,the atomic assumptions are:\n"
    "(1) There is a type of fish called betta fish.\n"
    "(2) Fish can survive without oxygen.\n"
    "\n"
    "Question: Why is card counting against the rules at casinos?\n"
    "Let us think step by step,the atomic assumptions are:\n"
    "(1) Card counting is a strategy used at casinos.\n"
    "(2) Casinos can have rules against certain behaviors.\n"
    "(3) Card counting is not allowed in some places.\n"
    "\n"
    "Question: How does the chest cavity close up after heart surgery is performed?.\n"
    "Let us think step by step,the atomic assumptions are:\n"
    "(1) The chest cavity can be opened and then closed up.\n"
    "(2) Heart surgery requires opening of the chest cavity.\n"
    "(3) The close of the chest cavity happens after heart surgery.\n"
    "\n"
    "Question: {question}\n"
    "Let us think step by step,the atomic assumptions are:";

// Two shots only. Their evidence lines stay "...".
const std::string_view kInterpret =
    "You will be provided with a question that contains at least 1 false assumption. Your "
    "task is to help me understand what are the false assumptions. Write an explanation to "
    "pinpoint the false assumptions.\n"
    "\n"
    "Question: How do betta fish survive without oxygen?\n"
    "Evidence: ...\n"
    "Interpretation: The question has a false assumption that betta fish can survive without "
    "oxygen. In fact, they need oxygen to survive.\n"
    "\n"
    "Question: Why can't we vote online?\n"
    "Evidence: ...\n"
    "Interpretation: The question has a false assumption that people cannot vote online. "
    "However, in some countries, it is allowed to vote online.\n"
    "\n"
    "Question: {question}\n"
    "Evidence: {evidence}\n"
    "Interpretation:";

const std::string_view kIdentifyZeroShot =
    "Determine whether the following {input_kind} contains any false assumptions. Output Yes "
    "if the {input_kind} has false assumptions; otherwise, output No.\n"
    "\n"
    "Input: {input}\n"
    "Answer:";

}  // namespace presuppose::prompts::builtin
