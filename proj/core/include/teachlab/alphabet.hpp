#pragma once

#include <span>
#include <string>
#include <vector>

namespace teachlab {

/// Recognizable characters plus the three specials. Ids are contiguous:
/// [P]=0, [S]=1, [E]=2, then chars from 3 in order.
struct Alphabet {
    std::string chars;

    static constexpr int kPad = 0;
    static constexpr int kStart = 1;
    static constexpr int kEnd = 2;
    static constexpr int kFirstChar = 3;

    /// Case-insensitive a-z plus 0-9.
    static Alphabet default36();

    /// Validates: non-empty, no duplicates, every char has a glyph.
    static Alphabet from_chars(std::string chars);

    int vocab_size() const { return kFirstChar + static_cast<int>(chars.size()); }
    int id_of(char c) const;
    char char_of(int id) const;
    bool contains(char c) const;
};

/// [S] label [E] padded with [P] to length seq_len. Label must leave room
/// for the two specials (len <= seq_len - 2).
std::vector<int> encode_label(const std::string& label, std::size_t seq_len, const Alphabet& a);

/// Per-position training targets: the input sequence shifted left by one,
/// with [P] appended. Position i predicts token i+1.
std::vector<int> shifted_targets(const std::vector<int>& input_ids);

/// Characters until the first [E]; [S]/[P] contribute nothing.
std::string decode_ids(std::span<const int> ids, const Alphabet& a);

}  // namespace teachlab
