"""
Chunking bilingual text
=======================

Documents are cut into retrieval-sized chunks by a recursive splitter that
prefers paragraph breaks, then line breaks, then the Bangla danda, then
sentence and word boundaries. Every chunk is an exact substring of the
source, so the (start, end) spans can drive citation highlighting.
"""

from gazette_rag import ChunkConfig, split_text

TEXT = """\
বাংলাদেশ গেজেট, অতিরিক্ত সংখ্যা। কর্তৃপক্ষ কর্তৃক প্রকাশিত।

ধারা ১। এই প্রবিধান ট্যুরিস্ট পুলিশ প্রবিধান নামে অভিহিত হইবে। ইহা অবিলম্বে কার্যকর হইবে।

Section 2. The Tourist Police shall protect visitors at beaches, resorts and
archaeological sites. It shall maintain liaison with tour operators.

ধারা ৩। নৌ পুলিশ নদীপথে টহল দিবে এবং মৎস্য আইন প্রয়োগ করিবে।"""

# A small chunk size so the behavior is visible at a glance; production
# defaults are 1000 characters with 150 overlap.
cfg = ChunkConfig(chunk_size=120, chunk_overlap=25)
drafts = split_text(TEXT, cfg)

print(f"{len(TEXT)} characters -> {len(drafts)} chunks "
      f"(size<={cfg.chunk_size}, overlap={cfg.chunk_overlap})\n")

for i, draft in enumerate(drafts):
    start, end = draft.char_span
    print(f"chunk {i}  [{start:4d}:{end:4d}]  {draft.text!r}")

# Overlapping spans mean consecutive chunks share trailing context; removing
# the shared prefix of each chunk reconstructs the source exactly.
rebuilt = drafts[0].text
for prev, cur in zip(drafts, drafts[1:]):
    rebuilt += cur.text[max(0, prev.char_span[1] - cur.char_span[0]):]
assert rebuilt == TEXT
print("\nreconstruction from spans: exact")
