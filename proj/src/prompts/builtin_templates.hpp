#pragma once

#include <string_view>

namespace presuppose::prompts::builtin {

extern const std::string_view kTransform;
extern const std::string_view kIdentifyPlainQuestion;
extern const std::string_view kIdentifyPlainStatement;
extern const std::string_view kIdentifyWithEvidence;
extern const std::string_view kGenerateKnowledge;
extern const std::string_view kAtomicGenerate;
extern const std::string_view kInterpret;
extern const std::string_view kIdentifyZeroShot;

}  // namespace presuppose::prompts::builtin
