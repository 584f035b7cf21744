#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ideation::docproc {

/// Token accounting for chunk budgets. `units` breaks text into the pieces a
/// chunk may be cut between (space-joining them reconstructs the token
/// sequence); `cost` is how many model tokens one unit consumes.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::string name() const = 0;
    virtual std::vector<std::string> units(std::string_view text) const = 0;
    virtual std::size_t cost(std::string_view unit) const = 0;

    std::size_t count(std::string_view text) const;
};

/// One token per whitespace-delimited word. The default.
class WhitespaceTokenizer final : public Tokenizer {
public:
    std::string name() const override { return "whitespace"; }
    std::vector<std::string> units(std::string_view text) const override;
    std::size_t cost(std::string_view) const override { return 1; }
};

/// Approximates subword tokenizers: ceil(bytes / chars_per_token) per word.
class CharRatioTokenizer final : public Tokenizer {
public:
    explicit CharRatioTokenizer(std::size_t chars_per_token = 4);
    std::string name() const override;
    std::vector<std::string> units(std::string_view text) const override;
    std::size_t cost(std::string_view unit) const override;

private:
    std::size_t chars_per_token_;
};

/// "whitespace" or "chars:<n>". Throws Config for anything else.
std::shared_ptr<const Tokenizer> make_tokenizer(std::string_view spec);

}  // namespace ideation::docproc
