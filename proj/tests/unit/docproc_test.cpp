#include <gtest/gtest.h>

#include <sstream>

#include <zlib.h>

#include "cases.hpp"
#include "ideation/docproc/document.hpp"
#include "ideation/docproc/tokenizer.hpp"
#include "ideation/docproc/user_corpus.hpp"
#include "ideation/error.hpp"
#include "ideation/service/hash_embedding.hpp"
#include "ideation/text.hpp"

using namespace ideation;
using namespace ideation::docproc;

namespace {

std::string pdf_with_stream(const std::string& stream, bool flate) {
    std::string body = stream;
    if (flate) {
        uLongf len = compressBound(static_cast<uLong>(stream.size()));
        std::string out(len, '\0');
        compress(reinterpret_cast<Bytef*>(out.data()), &len, reinterpret_cast<const Bytef*>(stream.data()),
                 static_cast<uLong>(stream.size()));
        out.resize(len);
        body = out;
    }
    std::string pdf = "%PDF-1.4\n1 0 obj\n<< /Length " + std::to_string(body.size()) +
                      (flate ? " /Filter /FlateDecode" : "") + " >>\nstream\n" + body + "\nendstream\nendobj\n%%EOF\n";
    return pdf;
}

}  // namespace

TEST(Segment, BlankLinesSeparateParagraphs) {
    auto doc = segment_paragraphs("First line\ncontinues here.\n\n  \t\nSecond paragraph.\n\n\n", "p1");
    EXPECT_EQ(doc.paper_id, "p1");
    ASSERT_EQ(doc.paragraphs.size(), 2u);
    EXPECT_EQ(doc.paragraphs[0], "First line\ncontinues here.");
    EXPECT_EQ(doc.paragraphs[1], "Second paragraph.");
    EXPECT_TRUE(segment_paragraphs("   \n\n ", "p2").paragraphs.empty());
}

TEST(Segment, InvalidUtf8NamesThePaper) {
    try {
        segment_paragraphs("ok\n\nbad \xc3", "paper-42");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find("paper-42"), std::string::npos);
    }
}

TEST(Segment, PdfTextObjectsBecomeParagraphs) {
    const std::string content = "BT /F1 12 Tf (Hello PDF world.) Tj ET\nBT [(Split) -250 (text)] TJ ET";
    for (bool flate : {false, true}) {
        auto doc = segment_paragraphs(pdf_with_stream(content, flate), "pdf1");
        ASSERT_EQ(doc.paragraphs.size(), 2u) << "flate=" << flate;
        EXPECT_EQ(doc.paragraphs[0], "Hello PDF world.");
        EXPECT_NE(doc.paragraphs[1].find("Split"), std::string::npos);
    }
    EXPECT_THROW(segment_paragraphs("%PDF-1.4\nno text here\n%%EOF", "pdf2"), Error);
}

TEST(Tokenizers, FactoryAndCosts) {
    EXPECT_EQ(make_tokenizer("whitespace")->name(), "whitespace");
    auto chars = make_tokenizer("chars:4");
    EXPECT_EQ(chars->name(), "chars:4");
    EXPECT_EQ(chars->cost("abcdefghi"), 3u);
    EXPECT_EQ(chars->count("abcd efgh ij"), 3u);
    EXPECT_EQ(WhitespaceTokenizer().count("a b\tc\n"), 3u);
    EXPECT_THROW(make_tokenizer("bpe"), Error);
    EXPECT_THROW(make_tokenizer("chars:0"), Error);
}

TEST(Split, GreedyFillWithinBudget) {
    WhitespaceTokenizer ws;
    auto pieces = split_to_fit("a b c d e f g", 3, ws);
    ASSERT_EQ(pieces.size(), 3u);
    EXPECT_EQ(pieces[0].text, "a b c");
    EXPECT_EQ(pieces[1].text, "d e f");
    EXPECT_EQ(pieces[2].text, "g");
    EXPECT_EQ(pieces[2].token_count, 1u);
    EXPECT_THROW(split_to_fit("a", 0, ws), Error);
    EXPECT_TRUE(split_to_fit("   ", 5, ws).empty());
}

TEST(Split, OversizeUnitStandsAlone) {
    CharRatioTokenizer chars(2);
    auto pieces = split_to_fit("ab cdefghij kl", 2, chars);  // costs 1, 4, 1
    ASSERT_EQ(pieces.size(), 3u);
    EXPECT_EQ(pieces[1].text, "cdefghij");
    EXPECT_TRUE(pieces[1].oversize);
    EXPECT_FALSE(pieces[0].oversize);
}

TEST(Split, RoundTripOnRandomParagraphs) {
    WhitespaceTokenizer ws;
    CharRatioTokenizer chars(3);
    for (const auto& p : support::random_paragraphs(150, 11)) {
        for (std::size_t budget : {1u, 8u, 50u, 512u}) {
            for (const Tokenizer* tk : {static_cast<const Tokenizer*>(&ws), static_cast<const Tokenizer*>(&chars)}) {
                std::vector<std::string> joined;
                for (const auto& piece : split_to_fit(p, budget, *tk)) {
                    if (!piece.oversize) EXPECT_LE(piece.token_count, budget);
                    EXPECT_EQ(piece.token_count, tk->count(piece.text));
                    joined.push_back(piece.text);
                }
                EXPECT_EQ(text::split_whitespace(text::join(joined, " ")), text::split_whitespace(p));
            }
        }
    }
}

TEST(Chunks, IdsAndIndices) {
    EXPECT_EQ(make_chunk_id("p1", 3, 12), "p1:0003.012");
    DocumentText doc{"p1", {"a b c d", "e"}};
    auto chunks = chunk_document(doc, 2, WhitespaceTokenizer());
    ASSERT_EQ(chunks.size(), 3u);
    EXPECT_EQ(chunks[0].chunk_id, "p1:0000.000");
    EXPECT_EQ(chunks[1].chunk_id, "p1:0000.001");
    EXPECT_EQ(chunks[2].paragraph_index, 1u);
    EXPECT_EQ(chunks[2].split_index, 0u);
    nlohmann::json j = chunks[1];
    EXPECT_EQ(j.get<Chunk>(), chunks[1]);
}

TEST(UserCorpus, OnlyAcceptedPapersAreIndexed) {
    service::HashEmbeddingProvider emb;
    UserCorpus uc("s1", {3, std::make_shared<WhitespaceTokenizer>()});
    DocumentText doc{"p1", {"graph neural networks for molecules", "limitations include small datasets"}};
    try {
        uc.index_chunks(doc, emb);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PreconditionFailed);
    }
    uc.accept_paper("p1");
    auto n = uc.index_chunks(doc, emb);
    EXPECT_EQ(n, 4u);
    EXPECT_EQ(uc.index_chunks(doc, emb), n);  // idempotent
    EXPECT_EQ(uc.chunk_count(), n);
    auto hits = uc.retrieve_chunks("p1", "limitations small datasets", 2, emb);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].chunk.text.find("datasets") != std::string::npos ||
                  hits[0].chunk.text.find("limitations") != std::string::npos,
              true);
    EXPECT_GE(hits[0].score, hits[1].score);
    EXPECT_THROW(uc.retrieve_chunks("p2", "q", 2, emb), Error);
}

TEST(UserCorpus, CloneAndDump) {
    service::HashEmbeddingProvider emb;
    UserCorpus uc("s1");
    uc.accept_paper("b");
    uc.accept_paper("a");
    uc.index_chunks({"b", {"second paper"}}, emb);
    uc.index_chunks({"a", {"first paper"}}, emb);
    auto copy = uc.clone("s2");
    EXPECT_EQ(copy->session_id(), "s2");
    EXPECT_TRUE(copy->is_indexed("a"));
    std::ostringstream out;
    uc.write_dump(out);
    const auto dump = out.str();
    auto lines = text::split_lines(dump);
    ASSERT_GE(lines.size(), 2u);
    EXPECT_NE(lines[0].find("\"a:0000.000\""), std::string::npos);  // papers in id order
}
