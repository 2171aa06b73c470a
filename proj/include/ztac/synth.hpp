#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ztac/decision.hpp"
#include "ztac/trust.hpp"

namespace ztac {

enum class AttributeCategory { User, Device, Data };

std::string_view to_string(AttributeCategory c);

// One attribute name of the shared schema and the category it belongs to.
struct SchemaEntry {
    std::string_view name;
    AttributeCategory category;
};

/// The 21 attribute names of the generated datasets, each in exactly one category.
const std::vector<SchemaEntry>& attribute_schema();

/// The nine specialty classes used throughout the generated data.
const std::vector<std::string>& specialty_names();

struct AttributeRow {
    AttributeCategory category;
    std::string name;
    std::string value;

    bool operator==(const AttributeRow&) const = default;
};

/// `count_per_category` rows per category, cycling through that category's schema
/// names, with values drawn from per-name domains. Deterministic for a seed.
std::vector<AttributeRow> generate_attributes(std::uint64_t seed, std::size_t count_per_category);

/// CSV with header "category,name,value"; fields containing ',' or '"' are quoted.
std::string attributes_to_csv(const std::vector<AttributeRow>& rows);

// ---- reports ----------------------------------------------------------------

/// Built-in report templates with {placeholder} slots.
const std::vector<std::string>& report_templates();

/// Placeholder names of a template, in order of first appearance.
std::vector<std::string> template_placeholders(std::string_view templ);

/// Substitutes every {placeholder}. Throws InvalidArgument naming a missing value
/// or an unterminated brace.
std::string render_template(std::string_view templ, const std::map<std::string, std::string>& record);

/// render_template of built-in template `template_id`. Throws InvalidArgument on an unknown id.
std::string generate_report(std::size_t template_id, const std::map<std::string, std::string>& record);

// ---- labeled samples ------------------------------------------------------------

enum class MismatchKind { None, WrongPatient, WrongDevice, SynonymSwap, ShuffledReport };

std::string_view to_string(MismatchKind k);
MismatchKind parse_mismatch_kind(std::string_view text);

enum class SampleLabel { Legit, Misuse };

std::string_view to_string(SampleLabel l);
SampleLabel parse_sample_label(std::string_view text);

struct LabeledSample {
    std::uint64_t id = 0;
    std::string specialty;
    AttributeTriple triple;
    std::vector<std::string> history;
    std::string candidate_report;
    SampleLabel label = SampleLabel::Legit;
    MismatchKind mismatch_kind = MismatchKind::None;
};

/// n samples of which ceil(n * mismatch_rate) are misuse, at seeded random positions,
/// each with a uniformly chosen mismatch kind. Throws InvalidArgument when the rate
/// is outside [0, 1].
std::vector<LabeledSample> generate_labeled_dataset(std::uint64_t seed, std::size_t n, double mismatch_rate);

/// One context sentence per line tying a specialty's roles, devices, data categories
/// and conditions together; used to build the co-occurrence model and the fallback embeddings.
std::vector<std::string> generate_corpus(std::uint64_t seed, std::size_t documents);

inline constexpr std::uint64_t kDefaultCorpusSeed = 20230327;
inline constexpr std::size_t kDefaultCorpusDocuments = 4000;
inline constexpr std::size_t kDefaultCorpusWindow = 16;

/// A consented, internally consistent request whose report reproduces its history:
/// all checks pass, every attribute belongs to one specialty.
AccessRequest golden_request(std::uint64_t seed);

/// Fields of a request built from a labeled sample (consent granted, every check passing).
AccessRequest request_from_sample(const LabeledSample& sample);

}  // namespace ztac
