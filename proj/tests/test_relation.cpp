#include <gtest/gtest.h>

#include "erl/relation.hpp"

using namespace erl;

TEST(Relation, VocabularySizes) {
  EXPECT_EQ(vocabulary(Axis::Coreference).size(), 2u);
  EXPECT_EQ(vocabulary(Axis::Temporal).size(), 7u);
  EXPECT_EQ(vocabulary(Axis::Causal).size(), 3u);
  EXPECT_EQ(vocabulary(Axis::Subevent).size(), 2u);
  EXPECT_EQ(kAllLabels.size(), 14u);
  EXPECT_EQ(kPositiveLabels.size(), 10u);
  for (Label l : kPositiveLabels) EXPECT_FALSE(is_negative(l));
}

TEST(Relation, NegativeLabelIsFirstOfEachVocabulary) {
  for (Axis a : kAllAxes) {
    EXPECT_EQ(vocabulary(a).front(), negative_label(a));
    EXPECT_TRUE(is_negative(negative_label(a)));
  }
}

TEST(Relation, ParseLabelExamples) {
  EXPECT_EQ(parse_label("ends_on", Axis::Temporal), Label::EndsOn);
  EXPECT_EQ(parse_label("ENDS-ON", Axis::Temporal), Label::EndsOn);
  EXPECT_EQ(parse_label("  begins on ", Axis::Temporal), Label::BeginsOn);
  EXPECT_EQ(parse_label("no_causal", Axis::Causal), Label::NoCausal);
  EXPECT_THROW(parse_label("CAUSE", Axis::Temporal), UnknownLabel);
  EXPECT_THROW(parse_label("LATER", Axis::Temporal), UnknownLabel);
  EXPECT_THROW(parse_label_any("SOMETIMES"), ValidationError);
}

TEST(Relation, ParseRoundTrip) {
  for (Label l : kAllLabels) {
    EXPECT_EQ(parse_label(to_string(l), axis_of(l)), l);
    EXPECT_EQ(parse_label_any(to_string(l)), l);
  }
  for (Axis a : kAllAxes) EXPECT_EQ(parse_axis(to_string(a)), a);
  EXPECT_EQ(parse_axis("coref"), Axis::Coreference);
}

TEST(Relation, CanonicalNamesUseHyphens) {
  EXPECT_EQ(to_string(Label::EndsOn), "ENDS-ON");
  EXPECT_EQ(to_string(Label::BeginsOn), "BEGINS-ON");
  EXPECT_EQ(to_string(Label::NoCoreference), "NO_COREFERENCE");
}

TEST(Relation, TupleValidation) {
  EXPECT_THROW(RelationTuple(Label::Before, Label::Before, Label::NoCausal, Label::NoSubevent),
               InvalidTuple);
  EXPECT_THROW(RelationTuple("x", "x", Label::NoCoreference, Label::Before, Label::NoCausal,
                             Label::NoSubevent),
               InvalidTuple);
  const RelationTuple t(Label::NoCoreference, Label::Simultaneous, Label::Cause, Label::NoSubevent);
  EXPECT_EQ(t.label_string(), "NO_COREFERENCE, SIMULTANEOUS, CAUSE, NO_SUBEVENT");
  EXPECT_EQ(t.temporal(), Label::Simultaneous);
}

TEST(Relation, AxisSet) {
  AxisSet s{Axis::Causal, Axis::Temporal};
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.members(), (std::vector<Axis>{Axis::Temporal, Axis::Causal}));
  EXPECT_FALSE(s.contains(Axis::Coreference));
  EXPECT_EQ(AxisSet::all().size(), 4u);
}

TEST(Relation, LexicographicOrderUsesNames) {
  const RelationTuple a(Label::NoCoreference, Label::Before, Label::Cause, Label::NoSubevent);
  const RelationTuple b(Label::NoCoreference, Label::Overlap, Label::Cause, Label::NoSubevent);
  EXPECT_TRUE(lexicographic_less(a, b));
  EXPECT_FALSE(lexicographic_less(b, a));
  EXPECT_FALSE(lexicographic_less(a, a));
}
