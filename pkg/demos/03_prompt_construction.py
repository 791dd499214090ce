"""
Prompt construction and ablations
=================================

Builds the textual model input for one instance: the task prompt with its
name/target slots, the conversation block, the worked example, the image
caption, and the byte-level token sequence — then shows how each ablation
flag removes exactly one segment.
"""

from stancebench.corpus.models import Instance, Utterance
from stancebench.prompt import (
    MARKER_TEXT,
    PromptTemplateConfig,
    build_prompt_bundle,
    detokenize,
)

path = [
    Utterance(id="u1", author="op", text="our town finally built the solar farm", depth=1),
    Utterance(id="u2", author="dana", text="costs came in under budget too", parent_id="u1", depth=2),
    Utterance(id="u3", author="kit", text="still think the land was wasted", parent_id="u2", depth=3),
]
ins = Instance(instance_id="demo:u3", target="solar farm", path=path,
               image_refs=["images/farm.png"], depth=3)

template = PromptTemplateConfig()
bundle = build_prompt_bundle(ins, caption="rows of panels in a field", template=template)

print("=== full text input ===")
print(bundle.gamma_t)
print(f"\ntokenized to {len(bundle.gamma_t_tokens)} byte tokens; "
      f"round-trip exact: {detokenize(bundle.gamma_t_tokens) == bundle.gamma_t}")

no_caption = build_prompt_bundle(ins, "rows of panels in a field",
                                 template.with_flags(omit_caption=True))
no_case = build_prompt_bundle(ins, "rows of panels in a field",
                              template.with_flags(omit_case=True))
single = build_prompt_bundle(ins, "rows of panels in a field",
                             template.with_flags(single_sentence=True))

print("\n=== ablations change exactly one segment ===")
print("caption removed byte-exactly:",
      bundle.gamma_t.replace("Caption: rows of panels in a field\n", "", 1) == no_caption.gamma_t)
print("case removed byte-exactly:   ",
      bundle.gamma_t.replace("\n" + template.case_text, "", 1) == no_case.gamma_t)
print("single-sentence line count:  ", len(single.conversation_block.split("\n")),
      "(full conversation:", len(bundle.conversation_block.split("\n")), "lines)")

print("\nmarker ids for the fusion layout:")
print("  " + ", ".join(f"{tag}={tid}" for tid, tag in sorted(MARKER_TEXT.items())))
