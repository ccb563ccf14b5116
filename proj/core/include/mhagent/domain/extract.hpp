#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mhagent/domain/severity.hpp"

// Tolerant extraction of labelled numbers from free-form model replies.
// Judge and evaluation models drift from their answer templates, so values
// are located by label anywhere in the reply rather than by position.
namespace mhagent::extract {

struct FieldSpec {
    std::string name;
    // Lower-case ASCII or verbatim non-ASCII spellings, matched case-insensitively.
    std::vector<std::string> labels;
    // Words accepted in place of a number, e.g. {"moderate", 2}.
    std::vector<std::pair<std::string, double>> word_values;
};

// For each field, the first value that follows one of its labels. The search
// window after a label stops at the next label of any field, so
// "depression and anxiety: 2" does not credit depression with the 2.
// Range notations such as "0-3" or "(0~2)" are skipped.
std::vector<std::optional<double>> labeled_values(std::string_view reply,
                                                  const std::vector<FieldSpec>& fields);

// Every plain number in the reply, in order, range notations excluded.
std::vector<double> all_numbers(std::string_view reply);

const FieldSpec& depression_field();
const FieldSpec& anxiety_field();

// Parses "depression:2 anxiety:3" and its many drifted variants.
// Throws ParseError when a severity is missing or non-integral and
// RangeError ("severity out of range") when a value falls outside [0,3].
MentalState mental_state(std::string_view reply);

}  // namespace mhagent::extract
