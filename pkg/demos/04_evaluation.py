"""
Scoring answers against a testset
=================================

Generated answers are scored by cosine similarity between their embedding
and the ground truth's embedding, aggregated as mean ± population standard
deviation plus per-domain means. Human 1-5 ratings aggregate separately.
The comparison table lines two pipelines up per domain.
"""

from gazette_rag import (
    EmbedderConfig,
    HumanRatings,
    QaItem,
    aggregate_human_scores,
    compare_pipelines,
    semantic_similarity_eval,
)
from gazette_rag.evaluation import render_comparison, render_report

ITEMS = [
    QaItem("q1", "ট্যুরিস্ট পুলিশ কবে গঠিত হয়?", "ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়।", "temporal"),
    QaItem("q2", "নৌ পুলিশ কী করে?", "নৌ পুলিশ নদীপথে টহল দেয় ও আইন প্রয়োগ করে।", "factual"),
    QaItem("q3", "প্রশিক্ষণ কত দিনের?", "মৌলিক প্রশিক্ষণ ছয় মাসের।", "statistical"),
    QaItem("q4", "চাঁদে কয়টি থানা আছে?", "নথিতে এ তথ্য নেই।", "out_of_context"),
]

embedder = EmbedderConfig(backend="mock", model_id="mock", dim=128)

# A sloppy system: paraphrases, one off-target answer.
vanilla_answers = {
    "q1": "সম্ভবত ২০১৩ সালের দিকে গঠিত হয়।",
    "q2": "নৌ পুলিশ নদীতে কাজ করে।",
    "q3": "প্রশিক্ষণ কয়েক মাস চলে।",
    "q4": "চাঁদে পুলিশের পাঁচটি থানা আছে।",  # confident nonsense
}
# A sharper system: closer to ground truth, refuses the trap question.
advanced_answers = {
    "q1": "ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়।",
    "q2": "নৌ পুলিশ নদীপথে টহল দেয় এবং আইন প্রয়োগ করে।",
    "q3": "মৌলিক প্রশিক্ষণ ছয় মাসের।",
    "q4": "নথিতে এ তথ্য পাওয়া যায়নি।",
}

vanilla_report = semantic_similarity_eval(vanilla_answers, ITEMS, embedder)
advanced_report = semantic_similarity_eval(advanced_answers, ITEMS, embedder)

print("single-pipeline report (vanilla):")
print(render_report(vanilla_report))

print("\npipeline comparison:")
print(render_comparison(compare_pipelines(vanilla_report, advanced_report)))

# Human ratings: per-response mean over the evaluators, then the mean of means.
ratings = HumanRatings(
    per_response={"q1": [4, 5, 4], "q2": [4, 4, 3], "q3": [5, 5, 4], "q4": [2, 3, 2]}
)
summary = aggregate_human_scores(ratings)
print("\nhuman scores (1-5):")
for response_id, score in summary.per_response_mean.items():
    print(f"  {response_id}: {score:.2f}")
print(f"  overall: {summary.overall:.2f}")
