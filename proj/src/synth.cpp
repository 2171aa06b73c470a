#include "ztac/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ztac/compliance.hpp"
#include "ztac/error.hpp"
#include "ztac/prng.hpp"
#include "ztac/text.hpp"

namespace ztac {

namespace {

struct Profile {
    std::string name;
    std::string department;
    std::vector<std::string> positions;
    std::vector<std::string> devices;
    std::vector<std::string> data_categories;
    std::vector<std::string> conditions;
    std::vector<std::string> treatments;
};

const std::vector<Profile>& profiles() {
    static const std::vector<Profile> p{
        {"Radiology", "radiology", {"radiologist", "radiographer"}, {"tomograph", "fluoroscope", "mammograph"},
         {"radiograph", "tomogram"}, {"fracture", "pneumothorax", "nodule"}, {"immobilization", "thoracostomy", "radiotracer"}},
        {"Gynecology", "gynecology", {"gynecologist", "midwife"}, {"colposcope", "hysteroscope", "cardiotocograph"},
         {"colposcopy", "cytology"}, {"endometriosis", "fibroids", "cervicitis"}, {"progestin", "myomectomy", "doxycycline"}},
        {"Oncology", "oncology", {"oncologist", "hematologist"}, {"linac", "brachytherapy", "apheresis"},
         {"biopsy", "histopathology"}, {"carcinoma", "lymphoma", "leukemia"}, {"chemotherapy", "rituximab", "radiotherapy"}},
        {"Dermatology", "dermatology", {"dermatologist", "dermatopathologist"}, {"dermatoscope", "cryoprobe", "phototherapy"},
         {"dermoscopy", "trichogram"}, {"psoriasis", "eczema", "melanoma"}, {"methotrexate", "emollients", "excision"}},
        {"Cardiology", "cardiology", {"cardiologist", "electrophysiologist"}, {"electrocardiograph", "holter", "defibrillator"},
         {"electrocardiogram", "echocardiogram"}, {"arrhythmia", "hypertension", "angina"}, {"amiodarone", "lisinopril", "nitroglycerin"}},
        {"Urology", "urology", {"urologist", "andrologist"}, {"cystoscope", "lithotripter", "uroflowmeter"},
         {"urinalysis", "cystoscopy"}, {"nephrolithiasis", "prostatitis", "incontinence"}, {"tamsulosin", "ciprofloxacin", "oxybutynin"}},
        {"Emergency", "emergency", {"paramedic", "intensivist"}, {"ventilator", "capnograph", "oximeter"},
         {"triage", "resuscitation"}, {"trauma", "sepsis", "anaphylaxis"}, {"epinephrine", "vasopressors", "transfusion"}},
        {"Dentistry", "dentistry", {"dentist", "orthodontist"}, {"orthopantomograph", "apexlocator", "scaler"},
         {"odontogram", "periodontogram"}, {"caries", "gingivitis", "periodontitis"}, {"restoration", "chlorhexidine", "scaling"}},
        {"Psychology", "psychology", {"psychologist", "psychiatrist"}, {"neurofeedback", "actigraph", "polygraph"},
         {"psychometrics", "questionnaire"}, {"depression", "anxiety", "insomnia"}, {"psychotherapy", "sertraline", "melatonin"}},
    };
    return p;
}

const std::vector<std::string> kLocationSuffix{"ward", "clinic", "lab", "unit"};
const std::vector<std::string> kArchiveSuffix{"archive", "repository", "vault"};
const std::vector<std::string> kManufacturers{"Medtronic", "Philips", "Siemens", "Draeger", "Mindray", "Baxter"};
const std::vector<std::string> kStorageTypes{"container", "ssd", "vm", "object store"};
const std::vector<std::string> kSensitivity{"high", "restricted", "confidential"};
const std::vector<std::string> kCompliance{"HIPAA", "HIPAA and PIPEDA", "GDPR"};
const std::vector<std::string> kEncryption{"AES-256", "AES-128", "ChaCha20"};

// Word-level substitutions used for legitimate rewording of a report.
const std::vector<std::pair<std::string, std::string>> kSynonyms{
    {"examined", "assessed"}, {"reviewed", "evaluated"}, {"indicates", "suggests"}, {"recorded", "captured"},
    {"prescribed", "ordered"}, {"scheduled", "arranged"}, {"findings", "results"},  {"plan", "strategy"},
    {"recommended", "advised"}, {"visit", "appointment"}, {"acquired", "obtained"}, {"consistent", "compatible"},
    {"presented", "reported"}, {"suspected", "considered"}, {"interpreted", "read"},  {"next", "following"},
};

const std::vector<std::string> kTemplates{
    "{patient} born on {birth_date} was examined by {position} {doctor} in {department} on {visit_date} . the "
    "{device_type} recorded a {data_category} that indicates {condition} . {doctor} prescribed {treatment} and "
    "scheduled a follow up visit .",
    "on {visit_date} {position} {doctor} reviewed the {data_category} of {patient} captured with the {device_type} "
    "in {department} . findings are consistent with {condition} and the plan is {treatment} .",
    "patient {patient} born {birth_date} presented to {department} . a {data_category} was acquired using "
    "{device_type} model {device_model} and interpreted by {doctor} as {condition} . recommended treatment is "
    "{treatment} .",
    "{department} note for {patient} dated {visit_date} : {condition} suspected after {data_category} review . device "
    "{device_type} operated by {position} {doctor} . next step {treatment} .",
    "{position} {doctor} documented {condition} for {patient} born {birth_date} . evidence from the {device_type} "
    "{data_category} supports {treatment} starting {visit_date} in {department} .",
};

std::string date_string(Xoshiro256& rng, int first_year, int years) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", first_year + static_cast<int>(rng.below(years)),
                  1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(28)));
    return buf;
}

std::string model_code(Xoshiro256& rng) {
    static constexpr char kLetters[] = "ABCDEFGHJKLMNPRSTUVWXYZ";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%c-%03d", kLetters[rng.below(23)], kLetters[rng.below(23)],
                  static_cast<int>(rng.below(1000)));
    return buf;
}

// Everything needed to render one patient's reports and attribute triple.
struct PatientRecord {
    std::size_t profile = 0;
    std::map<std::string, std::string> fields;
    std::uint64_t id_seed = 0;
};

PatientRecord make_record(Xoshiro256& rng, std::size_t profile_index) {
    const auto& p = profiles()[profile_index];
    PatientRecord r;
    r.profile = profile_index;
    r.id_seed = rng.next();
    auto& f = r.fields;
    f["patient"] = format_identifier(IdentifierClass::Name, rng.below(256));
    f["doctor"] = "dr " + std::string(format_identifier(IdentifierClass::Name, rng.below(256)));
    f["birth_date"] = date_string(rng, 1940, 70);
    f["visit_date"] = date_string(rng, 2018, 6);
    f["position"] = rng.pick(p.positions);
    f["department"] = p.department;
    f["device_type"] = rng.pick(p.devices);
    f["device_model"] = model_code(rng);
    f["data_category"] = rng.pick(p.data_categories);
    f["condition"] = rng.pick(p.conditions);
    f["treatment"] = rng.pick(p.treatments);
    f["device_location"] = p.department + " " + rng.pick(kLocationSuffix);
    f["storage_location"] = p.department + " " + rng.pick(kArchiveSuffix);
    return r;
}

AttributeTriple make_triple(const PatientRecord& r, Xoshiro256& rng) {
    const auto& f = r.fields;
    const auto& p = profiles()[r.profile];
    const std::uint64_t n = r.id_seed;
    AttributeTriple t;
    t.user = {
        {"Position", f.at("position")},
        {"Department", p.department},
        {"Speciality", p.name},
        {"ID", format_identifier(IdentifierClass::OtherUniqueId, n)},
        {"Insurance number", format_identifier(IdentifierClass::HealthPlanNumber, n >> 8)},
        {"User access level", "L" + std::to_string(rng.below(5))},
        {"User consent", "granted"},
        {"Password", "********"},
        {"Manager ID", format_identifier(IdentifierClass::OtherUniqueId, n >> 16)},
    };
    t.device = {
        {"MAC address", format_identifier(IdentifierClass::DeviceId, n >> 24)},
        {"IP address", format_identifier(IdentifierClass::IpAddress, n >> 32)},
        {"Device model", f.at("device_model")},
        {"Device type", f.at("device_type")},
        {"Device location", f.at("device_location")},
        {"Device manufacture", rng.pick(kManufacturers)},
    };
    t.data = {
        {"Data category", f.at("data_category")},
        {"Data encryption", rng.pick(kEncryption)},
        {"Data storage location", f.at("storage_location")},
        {"Storage type", rng.pick(kStorageTypes)},
        {"Data sensitivity level", rng.pick(kSensitivity)},
        {"Data compliance", rng.pick(kCompliance)},
    };
    return t;
}

void set_value(AttributeList& list, std::string_view name, std::string value) {
    for (auto& a : list) {
        if (a.name == name) a.value = std::move(value);
    }
}

std::size_t other_profile(Xoshiro256& rng, std::size_t current) {
    const std::size_t k = profiles().size();
    return (current + 1 + static_cast<std::size_t>(rng.below(k - 1))) % k;
}

std::string reword(const std::string& report, Xoshiro256& rng, std::size_t substitutions) {
    auto tokens = tokenize(report);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        for (const auto& [from, to] : kSynonyms) {
            if (tokens[i] == from) candidates.push_back(i);
        }
    }
    rng.shuffle(candidates);
    candidates.resize(std::min(candidates.size(), substitutions));
    for (auto i : candidates) {
        for (const auto& [from, to] : kSynonyms) {
            if (tokens[i] == from) {
                tokens[i] = to;
                break;
            }
        }
    }
    std::string out;
    for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
    return out;
}

std::string replace_token(const std::string& report, const std::string& from, const std::string& to) {
    const auto from_tokens = tokenize(from);
    auto tokens = tokenize(report);
    std::string out;
    for (std::size_t i = 0; i < tokens.size();) {
        if (i + from_tokens.size() <= tokens.size() &&
            std::equal(from_tokens.begin(), from_tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
            out += (out.empty() ? "" : " ") + to;
            i += from_tokens.size();
        } else {
            out += (out.empty() ? "" : " ") + tokens[i];
            ++i;
        }
    }
    return out;
}

LabeledSample make_sample(Xoshiro256& rng, std::uint64_t id, MismatchKind kind) {
    const std::size_t profile_index = static_cast<std::size_t>(rng.below(profiles().size()));
    const auto record = make_record(rng, profile_index);
    LabeledSample s;
    s.id = id;
    s.specialty = profiles()[profile_index].name;
    s.mismatch_kind = kind;
    s.label = kind == MismatchKind::None ? SampleLabel::Legit : SampleLabel::Misuse;
    s.triple = make_triple(record, rng);

    // History: one to three reports of this patient from distinct templates.
    std::vector<std::size_t> templates(kTemplates.size());
    for (std::size_t i = 0; i < templates.size(); ++i) templates[i] = i;
    rng.shuffle(templates);
    const std::size_t n_history = 1 + static_cast<std::size_t>(rng.below(3));
    for (std::size_t i = 0; i < n_history; ++i) s.history.push_back(render_template(kTemplates[templates[i]], record.fields));
    const std::size_t chosen = static_cast<std::size_t>(rng.below(n_history));
    const std::string& base = s.history[chosen];

    switch (kind) {
        case MismatchKind::None:
            s.candidate_report = rng.below(2) == 0 ? base : reword(base, rng, 1 + static_cast<std::size_t>(rng.below(3)));
            break;
        case MismatchKind::WrongPatient: {
            auto other = make_record(rng, profile_index);
            s.candidate_report = render_template(kTemplates[templates[chosen]], other.fields);
            break;
        }
        case MismatchKind::WrongDevice: {
            const auto& q = profiles()[other_profile(rng, profile_index)];
            set_value(s.triple.device, "Device type", rng.pick(q.devices));
            set_value(s.triple.device, "Device location", q.department + " " + rng.pick(kLocationSuffix));
            s.candidate_report = base;
            break;
        }
        case MismatchKind::SynonymSwap: {
            const auto& q = profiles()[other_profile(rng, profile_index)];
            const std::string swapped = rng.pick(q.data_categories);
            set_value(s.triple.data, "Data category", swapped);
            set_value(s.triple.data, "Data storage location", q.department + " " + rng.pick(kArchiveSuffix));
            s.candidate_report = replace_token(base, record.fields.at("data_category"), swapped);
            break;
        }
        case MismatchKind::ShuffledReport: {
            auto tokens = tokenize(base);
            rng.shuffle(tokens);
            std::string out;
            for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
            s.candidate_report = out;
            break;
        }
    }
    return s;
}

}  // namespace

std::string_view to_string(AttributeCategory c) {
    switch (c) {
        case AttributeCategory::User: return "User";
        case AttributeCategory::Device: return "Device";
        case AttributeCategory::Data: return "Data";
    }
    return "Unknown";
}

const std::vector<SchemaEntry>& attribute_schema() {
    using C = AttributeCategory;
    static const std::vector<SchemaEntry> schema{
        {"Position", C::User},           {"Department", C::User},         {"Speciality", C::User},
        {"ID", C::User},                 {"Insurance number", C::User},   {"User access level", C::User},
        {"User consent", C::User},       {"Password", C::User},           {"Manager ID", C::User},
        {"MAC address", C::Device},      {"IP address", C::Device},       {"Device model", C::Device},
        {"Device type", C::Device},      {"Device location", C::Device},  {"Device manufacture", C::Device},
        {"Data category", C::Data},      {"Data encryption", C::Data},    {"Data storage location", C::Data},
        {"Storage type", C::Data},       {"Data sensitivity level", C::Data}, {"Data compliance", C::Data},
    };
    return schema;
}

const std::vector<std::string>& specialty_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& p : profiles()) out.push_back(p.name);
        return out;
    }();
    return names;
}

std::vector<AttributeRow> generate_attributes(std::uint64_t seed, std::size_t count_per_category) {
    Xoshiro256 rng(seed);
    std::vector<AttributeRow> rows;
    rows.reserve(3 * count_per_category);
    for (auto category : {AttributeCategory::User, AttributeCategory::Device, AttributeCategory::Data}) {
        std::vector<std::string_view> names;
        for (const auto& e : attribute_schema()) {
            if (e.category == category) names.push_back(e.name);
        }
        for (std::size_t i = 0; i < count_per_category; ++i) {
            const auto record = make_record(rng, static_cast<std::size_t>(rng.below(profiles().size())));
            const auto triple = make_triple(record, rng);
            const auto& list = category == AttributeCategory::User     ? triple.user
                               : category == AttributeCategory::Device ? triple.device
                                                                       : triple.data;
            const auto name = names[i % names.size()];
            for (const auto& a : list) {
                if (a.name == name) rows.push_back({category, a.name, a.value});
            }
        }
    }
    return rows;
}

std::string attributes_to_csv(const std::vector<AttributeRow>& rows) {
    const auto field = [](std::string_view v) {
        if (v.find_first_of(",\"\n") == std::string_view::npos) return std::string(v);
        std::string out = "\"";
        for (char c : v) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    };
    std::string out = "category,name,value\n";
    for (const auto& r : rows) {
        out += field(to_string(r.category)) + "," + field(r.name) + "," + field(r.value) + "\n";
    }
    return out;
}

const std::vector<std::string>& report_templates() { return kTemplates; }

std::vector<std::string> template_placeholders(std::string_view templ) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < templ.size(); ++i) {
        if (templ[i] != '{') continue;
        const auto close = templ.find('}', i);
        if (close == std::string_view::npos) throw InvalidArgument("unterminated placeholder in template");
        std::string name(templ.substr(i + 1, close - i - 1));
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
        i = close;
    }
    return names;
}

std::string render_template(std::string_view templ, const std::map<std::string, std::string>& record) {
    std::string out;
    out.reserve(templ.size() + 64);
    for (std::size_t i = 0; i < templ.size(); ++i) {
        if (templ[i] != '{') {
            out.push_back(templ[i]);
            continue;
        }
        const auto close = templ.find('}', i);
        if (close == std::string_view::npos) throw InvalidArgument("unterminated placeholder in template");
        const std::string name(templ.substr(i + 1, close - i - 1));
        auto it = record.find(name);
        if (it == record.end()) throw InvalidArgument("missing value for placeholder {" + name + "}");
        out += it->second;
        i = close;
    }
    return out;
}

std::string generate_report(std::size_t template_id, const std::map<std::string, std::string>& record) {
    if (template_id >= kTemplates.size()) throw InvalidArgument("unknown template id " + std::to_string(template_id));
    return render_template(kTemplates[template_id], record);
}

std::string_view to_string(MismatchKind k) {
    switch (k) {
        case MismatchKind::None: return "none";
        case MismatchKind::WrongPatient: return "wrong-patient";
        case MismatchKind::WrongDevice: return "wrong-device";
        case MismatchKind::SynonymSwap: return "synonym-swap";
        case MismatchKind::ShuffledReport: return "shuffled-report";
    }
    return "unknown";
}

MismatchKind parse_mismatch_kind(std::string_view text) {
    for (auto k : {MismatchKind::None, MismatchKind::WrongPatient, MismatchKind::WrongDevice, MismatchKind::SynonymSwap,
                   MismatchKind::ShuffledReport}) {
        if (to_string(k) == text) return k;
    }
    throw InvalidArgument("unknown mismatch kind '" + std::string(text) + "'");
}

std::string_view to_string(SampleLabel l) { return l == SampleLabel::Legit ? "legit" : "misuse"; }

SampleLabel parse_sample_label(std::string_view text) {
    if (text == "legit") return SampleLabel::Legit;
    if (text == "misuse") return SampleLabel::Misuse;
    throw InvalidArgument("unknown label '" + std::string(text) + "'");
}

std::vector<LabeledSample> generate_labeled_dataset(std::uint64_t seed, std::size_t n, double mismatch_rate) {
    if (!(mismatch_rate >= 0.0 && mismatch_rate <= 1.0)) throw InvalidArgument("mismatch_rate must lie in [0, 1]");
    Xoshiro256 rng(seed);
    const auto misuse = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * mismatch_rate - 1e-9));
    std::vector<bool> is_misuse(n, false);
    std::fill(is_misuse.begin(), is_misuse.begin() + static_cast<std::ptrdiff_t>(std::min(misuse, n)), true);
    rng.shuffle(is_misuse);

    static constexpr std::array<MismatchKind, 4> kKinds{MismatchKind::WrongPatient, MismatchKind::WrongDevice,
                                                        MismatchKind::SynonymSwap, MismatchKind::ShuffledReport};
    std::vector<LabeledSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto kind = is_misuse[i] ? kKinds[rng.below(kKinds.size())] : MismatchKind::None;
        out.push_back(make_sample(rng, i, kind));
    }
    return out;
}

std::vector<std::string> generate_corpus(std::uint64_t seed, std::size_t documents) {
    Xoshiro256 rng(seed);
    std::vector<std::string> docs;
    docs.reserve(documents);
    for (std::size_t i = 0; i < documents; ++i) {
        const auto& p = profiles()[rng.below(profiles().size())];
        docs.push_back("the " + rng.pick(p.positions) + " in " + p.department + " uses the " + rng.pick(p.devices) +
                       " to record a " + rng.pick(p.data_categories) + " for " + rng.pick(p.conditions) +
                       " treated with " + rng.pick(p.treatments) + " in " + p.department);
    }
    return docs;
}

AccessRequest request_from_sample(const LabeledSample& sample) {
    AccessRequest r;
    r.triple = sample.triple;
    r.candidate_report = sample.candidate_report;
    r.patient_history = sample.history;
    r.checks = {true, true, true, true};
    r.requested_ops = Operation::Read | Operation::Update;
    r.group_ids = {0x01, 0x02, 0x03};
    r.requested_level = 2;
    return r;
}

AccessRequest golden_request(std::uint64_t seed) {
    Xoshiro256 rng(seed);
    auto sample = make_sample(rng, 0, MismatchKind::None);
    sample.candidate_report = sample.history.front();
    return request_from_sample(sample);
}

}  // namespace ztac
