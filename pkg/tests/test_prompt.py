import logging

import pytest

from stancebench.corpus.models import Utterance
from stancebench.errors import EmptyConversation, TemplateInvalid
from stancebench.prompt.templates import (
    CAPTION_HEADER,
    DEFAULT_CASE,
    PromptTemplateConfig,
    build_oneshot,
    build_prompt_bundle,
    build_text_input,
    decompose_text_input,
    render_task_prompt,
)

from conftest import make_instance


def path_of(n):
    utts = [Utterance(id="u1", author="op", text="the original post", depth=1)]
    for level in range(2, n + 1):
        utts.append(Utterance(id=f"u{level}", author=f"U{level}",
                              text=f"reply number {level}",
                              parent_id=utts[-1].id, depth=level))
    return utts


def test_default_template_renders_author_and_target():
    rendered = render_task_prompt("Tesla", "U4", PromptTemplateConfig())
    assert rendered.endswith("express U4's stance towards \"Tesla\".")
    assert "{name}" not in rendered and "{target}" not in rendered


def test_template_missing_slot_invalid():
    with pytest.raises(TemplateInvalid):
        render_task_prompt("x", "y", PromptTemplateConfig(p_t_template="no slots at all"))
    with pytest.raises(TemplateInvalid):
        render_task_prompt("x", "y", PromptTemplateConfig(p_t_template="{name} only"))
    with pytest.raises(TemplateInvalid):
        render_task_prompt("x", "y",
                           PromptTemplateConfig(p_t_template="{name} {target} {target}"))


def test_post_target_uses_full_post_text():
    post_text = "a long post serving as its own stance target"
    rendered = render_task_prompt(post_text, "U2", PromptTemplateConfig())
    assert f"towards \"{post_text}\"" in rendered


def test_oneshot_three_lines_between_prompt_and_case():
    template = PromptTemplateConfig()
    delta = build_oneshot("PROMPT", path_of(3), template)
    lines = delta.split("\n")
    assert lines[0] == "PROMPT"
    assert lines[1] == "op: the original post"
    assert lines[2] == "U2: reply number 2"
    assert lines[3] == "U3: reply number 3"
    assert delta.endswith(DEFAULT_CASE)


def test_single_sentence_renders_only_focus():
    template = PromptTemplateConfig(single_sentence=True)
    delta = build_oneshot("PROMPT", path_of(3), template)
    assert "op: the original post" not in delta
    assert "U3: reply number 3" in delta
    conversation = delta.split("\n")[1]
    assert conversation == "U3: reply number 3"


def test_omit_case_ends_at_conversation():
    template = PromptTemplateConfig(omit_case=True)
    delta = build_oneshot("PROMPT", path_of(2), template)
    assert delta.endswith("U2: reply number 2")
    assert "Case:" not in delta


def test_empty_path_rejected():
    with pytest.raises(EmptyConversation):
        build_oneshot("PROMPT", [], PromptTemplateConfig())


def test_text_input_ordering():
    template = PromptTemplateConfig()
    gamma = build_text_input("a red car", "DELTA", template)
    assert gamma == "[stance detection]\nCaption: a red car\nDELTA"


def test_text_input_omit_caption():
    template = PromptTemplateConfig(omit_caption=True)
    assert build_text_input("a red car", "DELTA", template) == "[stance detection]\nDELTA"


def test_empty_caption_keeps_header_and_warns(caplog):
    template = PromptTemplateConfig()
    with caplog.at_level(logging.WARNING):
        gamma = build_text_input("", "DELTA", template)
    assert gamma == "[stance detection]\nCaption: \nDELTA"
    assert any("caption is empty" in rec.message for rec in caplog.records)


def test_ablation_locality_caption():
    """Removing the caption changes exactly the caption segment, byte for byte."""
    ins = make_instance("x", depth=3)
    full = build_prompt_bundle(ins, "a busy chart", PromptTemplateConfig())
    ablated = build_prompt_bundle(ins, "a busy chart", PromptTemplateConfig(omit_caption=True))
    removed = CAPTION_HEADER + "a busy chart\n"
    assert full.gamma_t.replace(removed, "", 1) == ablated.gamma_t
    assert full.delta == ablated.delta


def test_ablation_locality_case():
    ins = make_instance("x", depth=3)
    template = PromptTemplateConfig()
    full = build_prompt_bundle(ins, "cap", template)
    ablated = build_prompt_bundle(ins, "cap", PromptTemplateConfig(omit_case=True))
    removed = "\n" + template.case_text
    assert full.gamma_t.replace(removed, "", 1) == ablated.gamma_t
    assert full.caption == ablated.caption


def test_decompose_roundtrip_all_flag_combinations():
    ins = make_instance("x", depth=2)
    for omit_caption in (False, True):
        for omit_case in (False, True):
            for single in (False, True):
                template = PromptTemplateConfig(
                    omit_caption=omit_caption, omit_case=omit_case, single_sentence=single)
                bundle = build_prompt_bundle(ins, "some caption", template)
                segments = decompose_text_input(bundle.gamma_t, template, bundle.p_t)
                assert segments["caption"] == bundle.caption
                assert segments["conversation_block"] == bundle.conversation_block
                assert segments["case"] == bundle.case
                assert segments["p_t"] == bundle.p_t


def test_decompose_rejects_tampered_input():
    ins = make_instance("x", depth=2)
    template = PromptTemplateConfig()
    bundle = build_prompt_bundle(ins, "cap", template)
    with pytest.raises(ValueError):
        decompose_text_input("garbage" + bundle.gamma_t, template, bundle.p_t)


def test_config_file_roundtrip(tmp_path):
    template = PromptTemplateConfig(task_tag="[stance detection]", omit_case=True)
    path = tmp_path / "template.json"
    import json
    path.write_text(json.dumps(template.to_dict()))
    loaded = PromptTemplateConfig.from_file(path)
    assert loaded == template
