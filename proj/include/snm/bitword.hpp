// bitword.hpp - MSB-first bit sequences used for heading and payload words.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace snm {

// A short bit string. The leftmost bit is the most significant in every
// numeric interpretation.
class BitWord {
public:
    BitWord() = default;

    explicit BitWord(std::string_view s) {
        bits_.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1') {
                throw std::invalid_argument("BitWord: string must contain only '0'/'1'");
            }
            bits_.push_back(c == '1' ? 1 : 0);
        }
    }

    static BitWord from_value(std::uint64_t value, std::size_t length) {
        if (length < 64 && (value >> length) != 0) {
            throw std::invalid_argument("BitWord::from_value: value does not fit in length");
        }
        BitWord w;
        w.bits_.resize(length);
        for (std::size_t i = 0; i < length; ++i) {
            w.bits_[i] = static_cast<std::uint8_t>((value >> (length - 1 - i)) & 1u);
        }
        return w;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }

    bool bit(std::size_t i) const { return bits_.at(i) != 0; }

    std::uint64_t value() const {
        if (bits_.size() > 64) {
            throw std::length_error("BitWord::value: word longer than 64 bits");
        }
        std::uint64_t v = 0;
        for (std::uint8_t b : bits_) v = (v << 1) | b;
        return v;
    }

    void push_back(bool b) { bits_.push_back(b ? 1 : 0); }

    void append(const BitWord& other) {
        bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    }

    BitWord slice(std::size_t pos, std::size_t len) const {
        if (pos + len > bits_.size()) {
            throw std::out_of_range("BitWord::slice: out of range");
        }
        BitWord w;
        w.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                       bits_.begin() + static_cast<std::ptrdiff_t>(pos + len));
        return w;
    }

    std::string str() const {
        std::string s;
        s.reserve(bits_.size());
        for (std::uint8_t b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    friend bool operator==(const BitWord&, const BitWord&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

}  // namespace snm
