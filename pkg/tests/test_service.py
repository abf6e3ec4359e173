"""HTTP service contract: check purity, deploy gating, records, sessions."""

import time

import pytest
from fastapi.testclient import TestClient

from crforge.agent.backends import ScriptedBackend
from crforge.agent.clients import HttpChecker, HttpDeployer
from crforge.agent.engine import AgentEngine
from crforge.agent.messages import BackendProfile
from crforge.kb.store import VectorStore
from crforge.service.app import create_app, session_view
from script_utils import draft_turn, drop_entry_point, text_turn, tool_turn


@pytest.fixture
def client(kb_root):
    app = create_app(kb_root=str(kb_root))
    with TestClient(app) as client:
        yield client


def _wait_terminal(client, deployment_id, timeout=5.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        record = client.get(f"/api/v1/deployments/{deployment_id}").json()
        if record["status"] in ("succeeded", "failed"):
            return record
        time.sleep(0.02)
    raise AssertionError("deployment did not reach a terminal status")


class TestHealth:
    def test_lists_frameworks_with_kbs(self, client):
        body = client.get("/api/v1/healthz").json()
        assert body["frameworks"] == ["cyris"]
        assert "version" in body

    def test_empty_without_kb_root(self):
        with TestClient(create_app(kb_root=None)) as client:
            assert client.get("/api/v1/healthz").json()["frameworks"] == []

    def test_new_folder_appears_on_rescan(self, kb_root, client):
        (kb_root / "nautilus").mkdir()
        assert client.get("/api/v1/healthz").json()["frameworks"] == ["cyris", "nautilus"]


class TestCheck:
    def test_valid_description(self, client, basic_range_text):
        resp = client.post(
            "/api/v1/frameworks/cyris/check",
            json={"framework": "cyris", "description_text": basic_range_text},
        )
        assert resp.status_code == 200
        assert resp.json() == {"status": "valid", "findings": []}

    def test_missing_entry_point_reported(self, client, basic_range_text):
        resp = client.post(
            "/api/v1/frameworks/cyris/check",
            json={"description_text": drop_entry_point(basic_range_text)},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "invalid"
        assert body["findings"][0]["code"] == "E_NO_ENTRY_POINT"

    def test_unknown_framework_404(self, client, basic_range_text):
        resp = client.post(
            "/api/v1/frameworks/nautilus/check",
            json={"description_text": basic_range_text},
        )
        assert resp.status_code == 404
        assert resp.json()["code"] == "UNKNOWN_FRAMEWORK"

    def test_oversized_body_413(self, client):
        resp = client.post(
            "/api/v1/frameworks/cyris/check",
            json={"description_text": "x" * (1 << 20 + 1)},
        )
        assert resp.status_code == 413
        assert resp.json()["code"] == "PAYLOAD_TOO_LARGE"

    def test_check_is_pure_and_byte_stable(self, client, basic_range_text):
        payload = {"framework": "cyris", "description_text": basic_range_text}
        first = client.post("/api/v1/frameworks/cyris/check", json=payload)
        second = client.post("/api/v1/frameworks/cyris/check", json=payload)
        assert first.content == second.content

    def test_error_bodies_carry_code_and_message(self, client):
        resp = client.post("/api/v1/frameworks/cyris/check", json={})
        assert resp.status_code == 422
        body = resp.json()
        assert {"code", "message"} <= set(body)


class TestDeploy:
    def test_invalid_description_is_422_with_report(self, client, basic_range_text):
        resp = client.post(
            "/api/v1/frameworks/cyris/deploy",
            json={"description_text": drop_entry_point(basic_range_text)},
        )
        assert resp.status_code == 422
        body = resp.json()
        assert body["code"] == "INVALID_DESCRIPTION"
        assert body["report"]["findings"][0]["code"] == "E_NO_ENTRY_POINT"

    def test_valid_description_deploys_async(self, client, basic_range_text):
        resp = client.post(
            "/api/v1/frameworks/cyris/deploy",
            json={"description_text": basic_range_text},
        )
        assert resp.status_code == 202
        record = _wait_terminal(client, resp.json()["deployment_id"])
        assert record["status"] == "succeeded"
        assert record["range_id"] == 1
        commands = [entry["command"] for entry in record["command_log"]]
        assert commands[0].startswith("upload ")
        assert commands[1].startswith("/opt/cyris/main.py")

    def test_dry_run_returns_plan_without_execution(self, client, basic_range_text):
        resp = client.post(
            "/api/v1/frameworks/cyris/deploy",
            json={"description_text": basic_range_text, "dry_run": True},
        )
        assert resp.status_code == 202
        record = client.get(f"/api/v1/deployments/{resp.json()['deployment_id']}").json()
        assert record["status"] == "succeeded"
        assert record["dry_run"] is True
        assert all(entry["output"] == "(dry run)" for entry in record["command_log"])

    def test_scripted_transport_failure(self, client, basic_range_text):
        resp = client.post(
            "/api/v1/frameworks/cyris/deploy",
            json={
                "description_text": basic_range_text,
                "target": {"type": "simulated", "fail_at_step": 2},
            },
        )
        record = _wait_terminal(client, resp.json()["deployment_id"])
        assert record["status"] == "failed"
        assert len(record["command_log"]) == 2

    def test_unknown_deployment_404(self, client):
        resp = client.get("/api/v1/deployments/nope")
        assert resp.status_code == 404
        assert resp.json()["code"] == "NOT_FOUND"

    def test_bad_target_type_400(self, client, basic_range_text):
        resp = client.post(
            "/api/v1/frameworks/cyris/deploy",
            json={"description_text": basic_range_text, "target": {"type": "carrier_pigeon"}},
        )
        assert resp.status_code == 400
        assert resp.json()["code"] == "BAD_TARGET"


class TestSessions:
    def test_scripted_session_round_trip(self, client, basic_range_text):
        script = [tool_turn("retrieve", {"query": "sections"}), draft_turn(basic_range_text)]
        created = client.post("/api/v1/sessions", json={"framework": "cyris", "script": script})
        assert created.status_code == 201
        session_id = created.json()["session_id"]

        resp = client.post(
            f"/api/v1/sessions/{session_id}/messages", json={"text": "one desktop VM"}
        )
        assert resp.status_code == 200
        body = resp.json()
        types = [e["type"] for e in body["events"]]
        assert types[-1] == "consent_request"
        assert body["checkpoint"]["status"] == "awaiting_deploy_consent"

        checkpoint = client.get(f"/api/v1/sessions/{session_id}").json()
        assert checkpoint == body["checkpoint"]

    def test_consent_endpoint_deploys_and_records(self, client, basic_range_text):
        created = client.post(
            "/api/v1/sessions", json={"framework": "cyris", "script": [draft_turn(basic_range_text)]}
        )
        session_id = created.json()["session_id"]
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "go"})

        resp = client.post(f"/api/v1/sessions/{session_id}/consent", json={"accept": True})
        body = resp.json()
        assert body["result"]["status"] == "succeeded"
        record = client.get(f"/api/v1/deployments/{body['deployment_id']}").json()
        assert record["status"] == "succeeded"

    def test_consent_decline_cancels(self, client, basic_range_text):
        created = client.post(
            "/api/v1/sessions", json={"framework": "cyris", "script": [draft_turn(basic_range_text)]}
        )
        session_id = created.json()["session_id"]
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "go"})
        resp = client.post(f"/api/v1/sessions/{session_id}/consent", json={"accept": False})
        assert resp.json()["deployment_id"] is None
        assert resp.json()["checkpoint"]["status"] == "done"

    def test_event_polling_with_cursor(self, client, basic_range_text):
        created = client.post(
            "/api/v1/sessions", json={"framework": "cyris", "script": [text_turn("hello!")]}
        )
        session_id = created.json()["session_id"]
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "hi"})

        page = client.get(f"/api/v1/sessions/{session_id}/events?after=0").json()
        assert [e["type"] for e in page["events"]] == ["user_message", "agent_message"]
        again = client.get(f"/api/v1/sessions/{session_id}/events?after={page['next']}").json()
        assert again["events"] == []

    def test_unknown_session_404(self, client):
        assert client.get("/api/v1/sessions/nope").status_code == 404

    def test_unknown_framework_session_404(self, client):
        resp = client.post("/api/v1/sessions", json={"framework": "nautilus", "script": []})
        assert resp.status_code == 404

    def test_sse_stream_replays_events(self, client, basic_range_text):
        created = client.post(
            "/api/v1/sessions", json={"framework": "cyris", "script": [text_turn("hello!")]}
        )
        session_id = created.json()["session_id"]
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "hi"})
        resp = client.get(f"/api/v1/sessions/{session_id}/events?stream=sse&idle_timeout=0.1")
        assert resp.headers["content-type"].startswith("text/event-stream")
        assert "event: user_message" in resp.text
        assert "event: agent_message" in resp.text
        assert "id: 0" in resp.text


class TestEngineOverHttp:
    """The agent engine consuming the service through its HTTP clients."""

    def _engine(self, client, script):
        return AgentEngine(
            framework_name="cyris",
            backend=ScriptedBackend(script),
            kb=VectorStore(framework_name="cyris", dimension=8, entries=[]),
            checker=HttpChecker(base_url="http://testserver", client=client),
            deployer=HttpDeployer(base_url="http://testserver", client=client),
            profile=BackendProfile(backend_id="scripted"),
        )

    def test_generation_loop_through_remote_checker(self, client, basic_range_text):
        script = [draft_turn(drop_entry_point(basic_range_text)), draft_turn(basic_range_text)]
        engine = self._engine(client, script)
        session = engine.start_session()
        outcome = engine.run_generation_loop(session, "one desktop VM")
        assert outcome.result == "success"
        assert outcome.iterations_used == 2
        reports = [m.tool_payload for m in session.transcript if m.tool_name == "check_syntax"]
        assert reports[0]["findings"][0]["code"] == "E_NO_ENTRY_POINT"

    def test_deploy_through_remote_deployer(self, client, basic_range_text):
        engine = self._engine(client, [draft_turn(basic_range_text)])
        session = engine.start_session()
        engine.run_generation_loop(session, "go")
        result, _ = engine.confirm_deploy(session, accept=True)
        assert result.succeeded
        assert any("main.py" in r.step for r in result.results)


class TestAuthToken:
    @pytest.fixture
    def authed_client(self, kb_root):
        app = create_app(kb_root=str(kb_root), auth_token="sekrit")
        with TestClient(app) as client:
            yield client

    def test_requests_without_token_are_401(self, authed_client, basic_range_text):
        resp = authed_client.post(
            "/api/v1/frameworks/cyris/check", json={"description_text": basic_range_text}
        )
        assert resp.status_code == 401
        assert resp.json()["code"] == "UNAUTHORIZED"

    def test_token_grants_access(self, authed_client, basic_range_text):
        resp = authed_client.post(
            "/api/v1/frameworks/cyris/check",
            json={"description_text": basic_range_text},
            headers={"Authorization": "Bearer sekrit"},
        )
        assert resp.status_code == 200

    def test_healthz_stays_open(self, authed_client):
        assert authed_client.get("/api/v1/healthz").status_code == 200


class TestSessionView:
    def test_deploy_enabled_only_when_awaiting_consent_with_valid_report(
        self, client, basic_range_text
    ):
        created = client.post(
            "/api/v1/sessions",
            json={
                "framework": "cyris",
                "script": [draft_turn(drop_entry_point(basic_range_text)), draft_turn(basic_range_text)],
            },
        )
        session_id = created.json()["session_id"]
        view0 = session_view(client.get(f"/api/v1/sessions/{session_id}").json())
        assert view0["deploy_enabled"] is False

        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "go"})
        view1 = session_view(client.get(f"/api/v1/sessions/{session_id}").json())
        assert view1["deploy_enabled"] is True
        assert view1["attempt_badge"] == "2/3"
        assert view1["findings"] == []

    def test_view_is_reload_stable(self, client, basic_range_text):
        created = client.post(
            "/api/v1/sessions", json={"framework": "cyris", "script": [draft_turn(basic_range_text)]}
        )
        session_id = created.json()["session_id"]
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "go"})
        first = session_view(client.get(f"/api/v1/sessions/{session_id}").json())
        second = session_view(client.get(f"/api/v1/sessions/{session_id}").json())
        assert first == second
