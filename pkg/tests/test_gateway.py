import json
import threading

import httpx
import pytest

from verge.claims import ClaimType, Status
from verge.errors import ConfigError, FixtureMiss, GatewayError, GatewayUnavailable, MalformedOutput, NetworkError, RateLimited
from verge.gateway import (
    SALIENT,
    STAGES,
    Gateway,
    HttpBackend,
    Sampling,
    ScriptedBackend,
    claim_type_from_label,
    fixture_key,
    parse_bridging,
    parse_classification,
    parse_decomposition,
    parse_entities,
    parse_formalization,
    parse_judge,
    parse_similarity,
)
from verge.gateway.prompts import fill, placeholders


def all_slots(stage, **given):
    return {s: given.get(s, f"<{s}>") for s in placeholders(stage)}


# -- prompts ----------------------------------------------------------------


def test_every_stage_has_a_template_covering_its_salient_slots():
    assert set(STAGES) == set(SALIENT)
    for stage in STAGES:
        assert set(SALIENT[stage]) <= placeholders(stage)


def test_fill_requires_exact_slots():
    system, prompt = fill("verbalize", {"FORMULA": "(p [X])"})
    assert "(p [X])" in prompt and "[FORMULA]" not in prompt
    with pytest.raises(ValueError):
        fill("verbalize", {})
    with pytest.raises(ValueError):
        fill("verbalize", {"FORMULA": "p", "EXTRA": "q"})


def test_backslashes_survive_substitution():
    _, prompt = fill("verbalize", {"FORMULA": r"a\1b"})
    assert r"a\1b" in prompt


# -- scripted backend -------------------------------------------------------


def scripted(entries):
    return Gateway(ScriptedBackend.from_document({"responses": entries}))


def test_scripted_lookup_ignores_presentation_slots():
    gw = scripted([{"stage": "judge", "slots": {"CLAIM": "c", "JUDGE_ID": "0"}, "response": "yes"}])
    assert gw.ask("judge", **all_slots("judge", CLAIM="c", JUDGE_ID="0", CONTEXT="anything")) == "yes"
    assert gw.ask("judge", **all_slots("judge", CLAIM="c", JUDGE_ID="0", CONTEXT="other")) == "yes"


def test_scripted_responses_are_consumed_in_order_then_sticky():
    slots = {"QUERY": "q", "PREVIOUS_ANSWER": ""}
    gw = scripted([{"stage": "generate", "slots": slots, "response": "one"},
                   {"stage": "generate", "slots": slots, "response": "two"}])
    asks = [gw.ask("generate", **all_slots("generate", **slots)) for _ in range(3)]
    assert asks == ["one", "two", "two"]


def test_expand_fans_out_over_a_slot():
    gw = scripted([{"stage": "formalize", "slots": {"CLAIM": "c"}, "expand": "SAMPLE",
                    "responses": ["a", "b"]}])
    assert gw.ask("formalize", **all_slots("formalize", CLAIM="c", SAMPLE="1")) == "b"
    with pytest.raises(FixtureMiss):
        gw.ask("formalize", **all_slots("formalize", CLAIM="c", SAMPLE="2"))


def test_keyed_entries():
    key = fixture_key("classify", {"CLAIM": "c"})
    assert len(key) == 16
    gw = scripted([{"stage": "classify", "key": key, "response": "LOGICAL"}])
    assert gw.ask("classify", CLAIM="c") == "LOGICAL"


def test_fixture_key_is_stable():
    # frozen value; changing the hashing scheme would orphan every fixture
    assert fixture_key("classify", {"CLAIM": "Alan drinks wine"}) == fixture_key("classify", {"CLAIM": "Alan drinks wine"})
    assert fixture_key("classify", {"CLAIM": "a"}) != fixture_key("classify", {"CLAIM": "b"})
    assert fixture_key("verbalize", {"FORMULA": "p"}) != fixture_key("classify", {"CLAIM": "p"})


@pytest.mark.parametrize("doc", [
    {},
    {"responses": [{"stage": "nope", "slots": {}, "response": "x"}]},
    {"responses": [{"stage": "classify", "slots": {}, "response": "x"}]},
    {"responses": [{"stage": "classify", "slots": {"CLAIM": "c"}, "response": 3}]},
    {"responses": [{"stage": "formalize", "slots": {"CLAIM": "c"}, "expand": "SAMPLE", "responses": "x"}]},
])
def test_malformed_fixtures_are_config_errors(doc):
    with pytest.raises(ConfigError):
        ScriptedBackend.from_document(doc)


def test_fixture_file_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "fx.json"
    p.write_text('{"responses": [\n  oops\n]}')
    with pytest.raises(ConfigError, match=":2:"):
        ScriptedBackend.from_file(p)


def test_unknown_stage_is_rejected():
    with pytest.raises(ValueError):
        scripted([]).ask("dance")


def test_concurrency_is_bounded():
    active, peak = [0], [0]
    lock = threading.Lock()
    release = threading.Event()

    class Slow:
        def complete(self, req):
            with lock:
                active[0] += 1
                peak[0] = max(peak[0], active[0])
            release.wait(0.05)
            with lock:
                active[0] -= 1
            return "ok"

    gw = Gateway(Slow(), max_concurrency=2)
    threads = [threading.Thread(target=gw.ask, args=("classify",), kwargs={"CLAIM": str(i)}) for i in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak[0] <= 2


# -- http backend -----------------------------------------------------------


def reply(content):
    return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})


def http_gateway(handler, **kw):
    backend = HttpBackend("http://llm.test/v1/", model="m", api_key="k", backoff_s=0,
                          transport=httpx.MockTransport(handler), **kw)
    return Gateway(backend, Sampling(temperature=0.5, thinking_budget=None))


def test_http_request_shape():
    seen = []

    def handler(request):
        seen.append(request)
        return reply("Alan drinks wine.")

    assert http_gateway(handler).ask("verbalize", FORMULA="(Drinks Alan Wine)") == "Alan drinks wine."
    req = seen[0]
    assert str(req.url) == "http://llm.test/v1/chat/completions"
    assert req.headers["authorization"] == "Bearer k"
    body = json.loads(req.content)
    assert body["model"] == "m" and body["temperature"] == 0.5 and "thinking" not in body
    assert [m["role"] for m in body["messages"]] == ["system", "user"]
    assert "(Drinks Alan Wine)" in body["messages"][1]["content"]


def test_http_retries_then_succeeds():
    codes = iter([503, 429, 200])

    def handler(request):
        code = next(codes)
        return reply("fine") if code == 200 else httpx.Response(code)

    assert http_gateway(handler).ask("classify", CLAIM="c") == "fine"


def test_http_gives_up_after_max_attempts():
    calls = []

    def limited(request):
        calls.append(1)
        return httpx.Response(429)

    with pytest.raises(RateLimited):
        http_gateway(limited, max_attempts=3).ask("classify", CLAIM="c")
    assert len(calls) == 3
    with pytest.raises(NetworkError):
        http_gateway(lambda r: httpx.Response(500)).ask("classify", CLAIM="c")

    def refuse(request):
        raise httpx.ConnectError("refused")

    with pytest.raises(NetworkError):
        http_gateway(refuse).ask("classify", CLAIM="c")


def test_http_client_errors_are_not_retried():
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(400, text="bad request")

    with pytest.raises(GatewayError):
        http_gateway(handler).ask("classify", CLAIM="c")
    assert len(calls) == 1
    with pytest.raises(GatewayError, match="shape"):
        http_gateway(lambda r: httpx.Response(200, json={"nope": 1})).ask("classify", CLAIM="c")


def test_http_needs_an_endpoint():
    with pytest.raises(GatewayUnavailable):
        HttpBackend(None)


# -- parsers ----------------------------------------------------------------


def test_type_aliases():
    assert claim_type_from_label("math") is ClaimType.MATHEMATICAL
    assert claim_type_from_label(" common sense ") is ClaimType.COMMONSENSE
    assert claim_type_from_label("Common-Sense") is ClaimType.COMMONSENSE
    assert claim_type_from_label("T") is ClaimType.TEMPORAL
    assert claim_type_from_label("poetic") is ClaimType.VAGUE


def test_decomposition():
    text = 'Here you go:\n```json\n[{"text": " Alan drinks wine ", "type": "L", "confidence": 1.4},' \
           ' {"text": "It is late"}]\n```'
    got = parse_decomposition(text)
    assert [c.text for c in got] == ["Alan drinks wine", "It is late"]
    assert got[0].type is ClaimType.LOGICAL and got[0].confidence == 1.0
    assert got[1].type is None and got[1].confidence is None
    assert parse_decomposition('{"claims": []}') == []
    with pytest.raises(MalformedOutput):
        parse_decomposition("no json here")
    with pytest.raises(MalformedOutput):
        parse_decomposition('[{"type": "L"}]')


def test_classification():
    assert parse_classification('{"type": "TEMPORAL", "confidence": 0.8}') == (ClaimType.TEMPORAL, 0.8)
    assert parse_classification("Probabilistic, because ...") == (ClaimType.PROBABILISTIC, None)
    assert parse_classification("") == (ClaimType.VAGUE, None)


def test_formalization():
    text = "Sure.\n<smt>(declare-const p Bool)\n(assert p)\n(check-sat)</smt> done"
    assert parse_formalization(text) == "(declare-const p Bool)\n(assert p)"
    assert parse_formalization("```smt2\n(assert q)\n```") == "(assert q)"
    with pytest.raises(MalformedOutput):
        parse_formalization("<smt>(assert (p</smt>")
    with pytest.raises(MalformedOutput):
        parse_formalization("<smt>(check-sat)</smt>")
    with pytest.raises(MalformedOutput):
        parse_formalization("sorry")
    assert parse_formalization("<smt>p</smt>") == "p"


def test_judge():
    v = parse_judge('{"verdict": "plausible", "confidence": 0.6}')
    assert v.verdict is Status.PLAUSIBLE and v.confidence == 0.6
    assert parse_judge('{"verdict": "Supported", "confidence": 7}').confidence == 1.0
    for junk in ("maybe", '{"verdict": "great"}', '{"verdict": "Supported", "confidence": "high"}', "[1]"):
        v = parse_judge(junk)
        assert v.verdict is Status.UNCERTAIN and v.confidence == 0.0


def test_similarity():
    assert parse_similarity("0.85") == 0.85
    assert parse_similarity("Similarity: 0.4 overall") == 0.4
    assert parse_similarity("3") == 1.0
    assert parse_similarity("none") is None


def test_entities_and_bridging():
    sig = parse_entities('{"sorts": ["Person"], "entities": [{"name": "Alan", "sort": "Person"}],'
                         ' "predicates": [{"name": "Guest", "args": ["Person"]}]}')
    assert sig.entities_of(sig.sorts[0]) == ["Alan"]
    with pytest.raises(MalformedOutput):
        parse_entities('{"entities": [{"name": "Alan", "sort": "Ghost"}]}')
    with pytest.raises(MalformedOutput):
        parse_entities("[]")
    axioms = parse_bridging('["(=> b_0 p)", {"smt": "(=> b_1 q)", "provenance": "rain"}]')
    assert [a.smt for a in axioms] == ["(=> b_0 p)", "(=> b_1 q)"]
    assert axioms[1].provenance == "rain"
    with pytest.raises(MalformedOutput):
        parse_bridging('[{"formula": "p"}]')
