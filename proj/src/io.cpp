#include "fixlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "fixlab/errors.hpp"

namespace fixlab {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const char* what, size_t line_no) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric " + what + " '" + s +
                         "'");
    }
}

long long parse_int(const std::string& s, const char* what, size_t line_no) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric " + what + " '" + s +
                         "'");
    }
}

constexpr const char* kFixationHeader =
    "image_id,subject_id,condition,fix_index,x_px,y_px,onset_ms,duration_ms";

}  // namespace

std::vector<ScanPath> load_fixation_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fixation log '" + path + "'");

    struct Row {
        long long fix_index;
        Fixation fix;
        size_t line_no;
    };
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<Row>> groups;
    std::set<std::tuple<std::string, std::string, std::string, long long>> seen;

    std::string line;
    size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != kFixationHeader)
                throw ParseError("line " + std::to_string(line_no) + ": expected header '" +
                                 std::string(kFixationHeader) + "'");
            header_seen = true;
            continue;
        }
        auto fields = split_csv_row(t);
        if (fields.size() != 8)
            throw ParseError("line " + std::to_string(line_no) + ": expected 8 columns, got " +
                             std::to_string(fields.size()));
        const std::string image_id = trim(fields[0]);
        const std::string subject_id = trim(fields[1]);
        const std::string cond = trim(fields[2]);
        condition_from_code(cond); // validates
        long long fix_index = parse_int(trim(fields[3]), "fix_index", line_no);
        Fixation f;
        f.x = parse_double(trim(fields[4]), "x_px", line_no);
        f.y = parse_double(trim(fields[5]), "y_px", line_no);
        f.onset = static_cast<double>(parse_int(trim(fields[6]), "onset_ms", line_no)) / 1000.0;
        f.duration =
            static_cast<double>(parse_int(trim(fields[7]), "duration_ms", line_no)) / 1000.0;
        if (f.duration <= 0.0)
            throw ParseError("line " + std::to_string(line_no) + ": duration must be positive");
        if (f.onset < 0.0)
            throw ParseError("line " + std::to_string(line_no) + ": onset must be non-negative");

        auto dup_key = std::make_tuple(image_id, subject_id, cond, fix_index);
        if (!seen.insert(dup_key).second)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate record (" +
                             image_id + ", " + subject_id + ", " + cond + ", fix_index " +
                             std::to_string(fix_index) + ")");
        groups[std::make_tuple(image_id, subject_id, cond)].push_back({fix_index, f, line_no});
    }
    if (!header_seen && line_no > 0)
        throw ParseError("fixation log '" + path + "' has no header row");

    std::vector<ScanPath> out;
    for (auto& [key, rows] : groups) {
        ScanPath sp;
        sp.image_id = std::get<0>(key);
        sp.subject_id = std::get<1>(key);
        sp.condition = condition_from_code(std::get<2>(key));
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.fix.onset < b.fix.onset; });
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && rows[i].fix.onset <= rows[i - 1].fix.onset)
                throw ParseError("line " + std::to_string(rows[i].line_no) +
                                 ": onsets must be strictly increasing within (" + sp.image_id +
                                 ", " + sp.subject_id + ", " + condition_code(sp.condition) + ")");
            sp.fixations.push_back(rows[i].fix);
        }
        out.push_back(std::move(sp));
    }
    return out;
}

void save_fixation_log(const std::string& path, const std::vector<ScanPath>& paths,
                       const std::string& provenance_comment) {
    std::ostringstream os;
    if (!provenance_comment.empty()) os << provenance_comment;
    os << kFixationHeader << "\n";
    for (const auto& sp : paths) {
        for (size_t i = 0; i < sp.fixations.size(); ++i) {
            const Fixation& f = sp.fixations[i];
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%zu,%.17g,%.17g,%lld,%lld\n",
                          sp.image_id.c_str(), sp.subject_id.c_str(),
                          condition_code(sp.condition), i, f.x, f.y,
                          static_cast<long long>(std::llround(f.onset * 1000.0)),
                          static_cast<long long>(std::llround(f.duration * 1000.0)));
            os << buf;
        }
    }
    write_file_atomic(path, os.str());
}

namespace {

ImageAnnotation annotation_from_json(const nlohmann::json& j,
                                     const std::set<std::string>& target_classes) {
    ImageAnnotation ann;
    ann.target_classes = target_classes;
    try {
        ann.image_id = j.at("image_id").get<std::string>();
        ann.width = j.at("width").get<int>();
        ann.height = j.at("height").get<int>();
        for (const auto& o : j.at("objects")) {
            BoundingBox b;
            b.class_label = o.at("class").get<std::string>();
            b.xmin = o.at("xmin").get<int>();
            b.ymin = o.at("ymin").get<int>();
            b.xmax = o.at("xmax").get<int>();
            b.ymax = o.at("ymax").get<int>();
            ann.objects.push_back(std::move(b));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("annotation JSON: ") + e.what());
    }
    if (ann.width <= 0 || ann.height <= 0)
        throw ValidationError("image '" + ann.image_id + "': non-positive dimensions");
    for (const auto& b : ann.objects) {
        if (b.xmin >= b.xmax || b.ymin >= b.ymax)
            throw ValidationError("image '" + ann.image_id + "': degenerate box for class '" +
                                  b.class_label + "'");
        if (b.xmin < 0 || b.ymin < 0 || b.xmax > ann.width || b.ymax > ann.height)
            throw ValidationError("image '" + ann.image_id + "': box for class '" + b.class_label +
                                  "' exceeds image bounds");
    }
    return ann;
}

}  // namespace

std::map<std::string, ImageAnnotation> load_annotations(
    const std::string& path, const std::set<std::string>& target_classes) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open annotation file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    std::map<std::string, ImageAnnotation> out;
    auto insert = [&](ImageAnnotation ann) {
        auto id = ann.image_id;
        if (!out.emplace(id, std::move(ann)).second)
            throw ValidationError("duplicate annotation for image '" + id + "'");
    };

    size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return out; // empty file -> empty map
    if (text[first] == '[') {
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("annotation JSON: ") + e.what());
        }
        for (const auto& j : arr) insert(annotation_from_json(j, target_classes));
    } else {
        std::istringstream lines(text);
        std::string line;
        size_t line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(t);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError("annotation line " + std::to_string(line_no) + ": " + e.what());
            }
            insert(annotation_from_json(j, target_classes));
        }
    }
    return out;
}

void save_annotations(const std::string& path,
                      const std::map<std::string, ImageAnnotation>& annotations) {
    std::ostringstream os;
    for (const auto& [id, ann] : annotations) {
        nlohmann::json j;
        j["image_id"] = id;
        j["width"] = ann.width;
        j["height"] = ann.height;
        j["objects"] = nlohmann::json::array();
        for (const auto& b : ann.objects) {
            j["objects"].push_back({{"class", b.class_label},
                                    {"xmin", b.xmin},
                                    {"ymin", b.ymin},
                                    {"xmax", b.xmax},
                                    {"ymax", b.ymax}});
        }
        os << j.dump() << "\n";
    }
    write_file_atomic(path, os.str());
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write '" + tmp + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw ValidationError("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ValidationError("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace fixlab
