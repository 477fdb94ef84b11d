#include "teachlab/alphabet.hpp"

#include <unordered_set>

#include "teachlab/errors.hpp"
#include "teachlab/font5x7.hpp"

namespace teachlab {

Alphabet Alphabet::default36() {
    return from_chars("abcdefghijklmnopqrstuvwxyz0123456789");
}

Alphabet Alphabet::from_chars(std::string chars) {
    if (chars.empty()) {
        throw ContractError("alphabet must be non-empty");
    }
    std::unordered_set<char> seen;
    for (char c : chars) {
        if (!seen.insert(c).second) {
            throw ContractError(std::string("duplicate character '") + c + "' in alphabet");
        }
        if (!glyph5x7_exists(c)) {
            throw ContractError(std::string("character '") + c + "' has no glyph");
        }
    }
    Alphabet a;
    a.chars = std::move(chars);
    return a;
}

int Alphabet::id_of(char c) const {
    const auto pos = chars.find(c);
    if (pos == std::string::npos) {
        throw ContractError(std::string("character '") + c + "' not in alphabet");
    }
    return kFirstChar + static_cast<int>(pos);
}

char Alphabet::char_of(int id) const {
    const int idx = id - kFirstChar;
    if (idx < 0 || idx >= static_cast<int>(chars.size())) {
        throw ContractError("id " + std::to_string(id) + " is not an alphabet character");
    }
    return chars[static_cast<std::size_t>(idx)];
}

bool Alphabet::contains(char c) const { return chars.find(c) != std::string::npos; }

std::vector<int> encode_label(const std::string& label, std::size_t seq_len, const Alphabet& a) {
    if (label.empty()) {
        throw ContractError("label must be non-empty");
    }
    if (label.size() > seq_len - 2) {
        throw ContractError("label '" + label + "' too long for sequence length " +
                            std::to_string(seq_len));
    }
    std::vector<int> ids;
    ids.reserve(seq_len);
    ids.push_back(Alphabet::kStart);
    for (char c : label) {
        ids.push_back(a.id_of(c));
    }
    ids.push_back(Alphabet::kEnd);
    ids.resize(seq_len, Alphabet::kPad);
    return ids;
}

std::vector<int> shifted_targets(const std::vector<int>& input_ids) {
    std::vector<int> t(input_ids.begin() + 1, input_ids.end());
    t.push_back(Alphabet::kPad);
    return t;
}

std::string decode_ids(std::span<const int> ids, const Alphabet& a) {
    std::string out;
    for (int id : ids) {
        if (id == Alphabet::kEnd) break;
        if (id == Alphabet::kStart || id == Alphabet::kPad) continue;
        out += a.char_of(id);
    }
    return out;
}

}  // namespace teachlab
