#include "debugta/llm.hpp"

#include <algorithm>

namespace debugta::llm {

namespace {

// Variable alignment prompt, reproduced verbatim.
constexpr std::string_view kVarMapping = R"PROMPT(You are an experienced C++ programming expert who has received two pseudocode versions of a task - one correct code and one incorrect code. Now, please identify the corresponding variable names between the correct and incorrect code. Variables in both codes have similar functions, but note the following points:
1. Avoid simply swapping the order of two variables
2. Focus only on variable names, avoid confusing different variable types, check variable types, and especially avoid naming conflicts after modifications
3. Don't change the meaning of variables, ensure the code remains correct, only match variable names.
4. Output only the variable correspondence between correct and incorrect code in JSON format, without any additional text or explanation, according to this structure:
{
  "correct code variable":"incorrect code variable"
}
After analyzing the purpose of code variables, please output only this correspondence relationship in JSON format.
Example:
Correct code:
    \begin{algorithm}
    \caption{algorithm name}
    \KwIn{$n$ is the range.}
    \KwOut{$sum$ is the sum of the range.}
    set sum = 0
    \For{$t = 1$ \KwTo $n$}{
        sum += t\;
    }
    Print $sum$;
    \end{algorithm}
Incorrect Code:
    \begin{algorithm}
    \caption{algorithm name}
    \KwIn{$M$ is the range.}
    \KwOut{$s$ is the sum of the range.}
    set s = 0
    \For{$i = 1$ \KwTo $M$}{
        s += i;
    }
    Print $s$;
    \end{algorithm}
Output:
    {
        "n":"M",
        "t":"i",
        "sum":"s"
    }
Now I give you your task.
Correct code:
{pseudocode of reference code}
Incorrect Code:
{pseudocode of erroneous code})PROMPT";

// Pseudocode conversion prompt.
constexpr std::string_view kToPseudocode = R"PROMPT(You are an experienced C++ programming expert. Convert the following C++ code into Latex-style pseudocode written in an algorithm environment (\begin{algorithm} ... \end{algorithm}) using algorithm2e commands (\KwIn, \KwOut, \For, \While, \If, \KwTo, Print, etc.).
Please write the algorithm name in the caption of the pseudocode.
Code:
```cpp
{code}
```
Algorithm name: {name}.)PROMPT";

constexpr std::string_view kSuggestionFormat =
    R"(Answer with a JSON object of the form {"suggestions": ["...", "..."]}, one concrete modification suggestion per entry, each naming the line or token it concerns. Do not write the corrected program.)";

constexpr std::string_view kSynCorrection = R"(You are a programming teacher helping a student fix compile errors in a C++ program.

Student program:
```cpp
{code}
```

Compiler error messages:
{error_messages}

Explain what must change so the program compiles. Refer to the student's own lines; do not rewrite the program.
{format})";

constexpr std::string_view kLogicCorrection = R"(You are a programming teacher. A student's C++ program compiles but gives wrong answers.

Problem description:
{question}

Student program:
```cpp
{code}
```

Correct reference program (private to you, variable names aligned with the student's program where possible):
```cpp
{reference}
```

Compare the student's program with the reference and identify the logical errors in the student's program. Describe each change the student should make in words, pointing to the student's lines. Never copy more than a single line of the reference program into a suggestion.
{format})";

constexpr std::string_view kLogicNoReference = R"(You are a programming teacher. A student's C++ program compiles but gives wrong answers. No reference solution is available for this problem.

Problem description:
{question}

Student program:
```cpp
{code}
```

Identify the logical errors in the student's program. Describe each change the student should make in words, pointing to the student's lines.
{format})";

constexpr std::string_view kStubotRevise = R"(You are a student learning C++. You wrote a program for the problem below, and your teacher has given you suggestions.

Problem description:
{question}

Your current program:
```cpp
{code}
```

Teacher's suggestions:
{suggestions}

Apply the suggestions to your program. Output the complete revised program inside a single ```cpp code block.)";

constexpr std::string_view kDirectDebug = R"(The following C++ program is meant to solve the problem below but contains errors.

Problem description:
{question}

Program:
```cpp
{code}
```

Debug the program. Output the complete corrected program inside a single ```cpp code block.)";

constexpr std::string_view kDebugWithS = R"(The following C++ program is meant to solve the problem below but contains errors. A correct reference solution is also given.

Problem description:
{question}

Program:
```cpp
{code}
```

Reference solution:
```cpp
{reference}
```

Debug the program. Output the complete corrected program inside a single ```cpp code block.)";

constexpr std::string_view kSelfDebugExplain = R"(The following C++ program is meant to solve the problem below but contains errors.

Problem description:
{question}

Program:
```cpp
{code}
```

Explain the program line by line. Then compare what it does with the problem description and state where the two disagree.)";

constexpr std::string_view kSelfDebugTrace = R"(The following C++ program is meant to solve the problem below but contains errors.

Problem description:
{question}

Program:
```cpp
{code}
```

Pick a small input for the problem and trace the execution step by step, line by line, listing intermediate variable values and control flow. Then state where the behaviour departs from what the problem requires.)";

constexpr std::string_view kSelfDebugFix = R"(Problem description:
{question}

Program:
```cpp
{code}
```

Analysis of the program:
{analysis}

Using the analysis, fix the program. Output the complete corrected program inside a single ```cpp code block.)";

constexpr std::string_view kDirectTeach = R"(You are a programming teacher. A student submitted the C++ program below for the problem described, and it is wrong. A correct reference solution is given for your eyes only.

Problem description:
{question}

Student program:
```cpp
{code}
```

Reference solution:
```cpp
{reference}
```

Give the student modification suggestions that lead to a correct program without handing over the reference solution.
{format})";

using Placeholders = std::vector<std::pair<std::string, std::string>>;

Template make(TemplateId id, std::string_view text, Placeholders placeholders) {
    return Template{id, std::string(text), std::move(placeholders)};
}

std::string with_format(std::string_view text) {
    std::string out(text);
    const auto pos = out.find("{format}");
    if (pos != std::string::npos) out.replace(pos, 8, kSuggestionFormat);
    return out;
}

const std::vector<Template>& all_templates() {
    static const std::vector<Template> templates = [] {
        const Placeholders qc = {{"{question}", "question"}, {"{code}", "code"}};
        const Placeholders qcr = {{"{question}", "question"}, {"{code}", "code"}, {"{reference}", "reference"}};
        std::vector<Template> t;
        t.push_back(make(TemplateId::syn_correction, with_format(kSynCorrection),
                         {{"{code}", "code"}, {"{error_messages}", "error_messages"}}));
        t.push_back(make(TemplateId::to_pseudocode, kToPseudocode, {{"{code}", "code"}, {"{name}", "name"}}));
        t.push_back(make(TemplateId::var_mapping, kVarMapping,
                         {{"{pseudocode of reference code}", "reference_pseudocode"},
                          {"{pseudocode of erroneous code}", "erroneous_pseudocode"}}));
        t.push_back(make(TemplateId::logic_correction, with_format(kLogicCorrection), qcr));
        t.push_back(make(TemplateId::logic_correction_no_reference, with_format(kLogicNoReference), qc));
        t.push_back(make(TemplateId::stubot_revise, kStubotRevise,
                         {{"{question}", "question"}, {"{code}", "code"}, {"{suggestions}", "suggestions"}}));
        t.push_back(make(TemplateId::baseline_direct_debug, kDirectDebug, qc));
        t.push_back(make(TemplateId::baseline_debug_with_s, kDebugWithS, qcr));
        t.push_back(make(TemplateId::baseline_selfdebug_explain, kSelfDebugExplain, qc));
        t.push_back(make(TemplateId::baseline_selfdebug_trace, kSelfDebugTrace, qc));
        t.push_back(make(TemplateId::baseline_selfdebug_fix, kSelfDebugFix,
                         {{"{question}", "question"}, {"{code}", "code"}, {"{analysis}", "analysis"}}));
        t.push_back(make(TemplateId::baseline_direct_teach, with_format(kDirectTeach), qcr));
        return t;
    }();
    return templates;
}

constexpr std::pair<TemplateId, std::string_view> kNames[] = {
    {TemplateId::syn_correction, "syn_correction"},
    {TemplateId::to_pseudocode, "to_pseudocode"},
    {TemplateId::var_mapping, "var_mapping"},
    {TemplateId::logic_correction, "logic_correction"},
    {TemplateId::logic_correction_no_reference, "logic_correction_no_reference"},
    {TemplateId::stubot_revise, "stubot_revise"},
    {TemplateId::baseline_direct_debug, "baseline_direct_debug"},
    {TemplateId::baseline_debug_with_s, "baseline_debug_with_s"},
    {TemplateId::baseline_selfdebug_explain, "baseline_selfdebug_explain"},
    {TemplateId::baseline_selfdebug_trace, "baseline_selfdebug_trace"},
    {TemplateId::baseline_selfdebug_fix, "baseline_selfdebug_fix"},
    {TemplateId::baseline_direct_teach, "baseline_direct_teach"},
};

}  // namespace

std::string to_string(TemplateId id) {
    for (const auto& [tid, name] : kNames) {
        if (tid == id) return std::string(name);
    }
    return "unknown";
}

TemplateId template_from_string(const std::string& s) {
    for (const auto& [tid, name] : kNames) {
        if (name == s) return tid;
    }
    throw ConfigError("unknown template id: " + s);
}

const Template& get_template(TemplateId id) {
    for (const auto& t : all_templates()) {
        if (t.id == id) return t;
    }
    throw Error("no template for id " + to_string(id));
}

std::vector<std::string> required_slots(TemplateId id) {
    std::vector<std::string> out;
    for (const auto& [placeholder, slot] : get_template(id).placeholders) out.push_back(slot);
    return out;
}

std::string render(const ChatRequest& request) {
    if (request.temperature < 0.0) throw PreconditionError("temperature must be >= 0");
    const auto& tmpl = get_template(request.template_id);
    for (const auto& [name, value] : request.slots) {
        const bool known = std::any_of(tmpl.placeholders.begin(), tmpl.placeholders.end(),
                                       [&](const auto& p) { return p.second == name; });
        if (!known) {
            throw PreconditionError("slot '" + name + "' is not used by template " +
                                    to_string(request.template_id));
        }
    }
    // Single left-to-right pass so slot values are never re-scanned for placeholders.
    std::string out;
    std::size_t pos = 0;
    const auto& text = tmpl.text;
    while (pos < text.size()) {
        std::size_t best = std::string::npos;
        const std::pair<std::string, std::string>* hit = nullptr;
        for (const auto& p : tmpl.placeholders) {
            const auto at = text.find(p.first, pos);
            if (at < best) {
                best = at;
                hit = &p;
            }
        }
        if (!hit) {
            out.append(text, pos, std::string::npos);
            break;
        }
        auto it = request.slots.find(hit->second);
        if (it == request.slots.end()) {
            throw PreconditionError("template " + to_string(request.template_id) +
                                    " requires slot '" + hit->second + "'");
        }
        out.append(text, pos, best - pos);
        out.append(it->second);
        pos = best + hit->first.size();
    }
    if (!request.addendum.empty()) {
        out += "\n\n";
        out += request.addendum;
    }
    return out;
}

}  // namespace debugta::llm
