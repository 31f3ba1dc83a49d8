"""Recording service lifecycle, watchdog wiring, and the HTTP facade."""

import json
import threading

import pytest
import requests

from clickwalk.export import validate_document
from clickwalk.service import RecorderService, ServiceConfig, build_http_server
from clickwalk.watchdog import InvalidDelayError, ManualTimerBackend


@pytest.fixture()
def clock():
    return ManualTimerBackend()


@pytest.fixture()
def service(tmp_path, clock):
    config = ServiceConfig(keep_alive_timeout_ms=10_000, out_dir=tmp_path)
    return RecorderService(config, timer_backend=clock)


class TestLifecycle:
    def test_start_answers_started(self, service):
        assert service.start_recording("PetClinic") == (200, "STARTED")

    def test_missing_title(self, service):
        assert service.start_recording(None) == (400, "MISSING_TITLE")
        assert service.start_recording("  ") == (400, "MISSING_TITLE")

    def test_zero_timeout_rejected_at_startup(self, tmp_path):
        with pytest.raises(InvalidDelayError):
            RecorderService(ServiceConfig(keep_alive_timeout_ms=0, out_dir=tmp_path))

    def test_events_without_session(self, service):
        assert service.vertex_event("Home") == (409, "NO_SESSION")
        assert service.edge_event("Click") == (409, "NO_SESSION")

    def test_empty_names_rejected(self, service):
        service.start_recording("T")
        assert service.vertex_event("") == (400, "MISSING_NAME")
        assert service.vertex_event(None) == (400, "MISSING_NAME")
        assert service.edge_event("   ") == (400, "MISSING_NAME")

    def test_unusable_name_rejected(self, service):
        service.start_recording("T")
        assert service.vertex_event("!!!") == (400, "BAD_NAME")

    def test_edge_then_vertex_records_transition(self, service, tmp_path):
        service.start_recording("PetClinic")
        service.vertex_event("Welcome Page")
        assert service.edge_event("FINDOWNERS") == (200, "OK")
        assert service.vertex_event("Find Owners") == (200, "OK")
        assert service.stop_recording() == (200, "STOPPED")
        saved = json.loads((tmp_path / "PetClinic.json").read_text())
        names = [e["name"] for e in saved["models"][0]["edges"]]
        assert names == ["e_FINDOWNERS"]

    def test_stop_without_session(self, service):
        assert service.stop_recording() == (409, "NO_SESSION")

    def test_stop_then_events_rejected(self, service):
        service.start_recording("T")
        service.stop_recording()
        assert service.vertex_event("Home") == (409, "NO_SESSION")
        assert service.stop_recording() == (409, "NO_SESSION")

    def test_stop_writes_validating_file(self, service, tmp_path):
        service.start_recording("My Run")
        service.vertex_event("Home")
        service.edge_event("Search")
        service.vertex_event("Results")
        service.stop_recording()
        path = tmp_path / "My_Run.json"
        assert path.exists()
        assert validate_document(path.read_text()).is_valid

    def test_start_preempts_running_session(self, service, tmp_path):
        service.start_recording("First")
        service.vertex_event("Home")
        assert service.start_recording("Second") == (200, "STARTED")
        assert (tmp_path / "First.json").exists()
        assert service.vertex_event("Other") == (200, "OK")
        service.stop_recording()
        assert (tmp_path / "Second.json").exists()

    def test_storage_failure_on_stop(self, tmp_path, clock):
        bad_dir = tmp_path / "missing"
        svc = RecorderService(
            ServiceConfig(keep_alive_timeout_ms=10_000, out_dir=bad_dir),
            timer_backend=clock,
        )
        svc.start_recording("T")
        svc.vertex_event("Home")
        assert svc.stop_recording() == (500, "STORAGE_FAILURE")
        # session is still gone: events no longer accepted
        assert svc.vertex_event("Home") == (409, "NO_SESSION")


class TestWatchdogIntegration:
    def test_silence_finalizes_and_saves(self, service, clock, tmp_path):
        service.start_recording("T")
        service.vertex_event("Home")
        clock.advance(9_999)
        assert service.vertex_event("Still Here") == (200, "OK")
        clock.advance(1)
        assert (tmp_path / "T.json").exists()
        assert service.vertex_event("Too Late") == (409, "NO_SESSION")

    def test_keepalive_extends_deadline(self, service, clock, tmp_path):
        service.start_recording("T")
        clock.advance(9_000)
        assert service.keepalive() == (200, "ALIVE")
        clock.advance(9_999)
        assert not (tmp_path / "T.json").exists()
        clock.advance(1)
        assert (tmp_path / "T.json").exists()

    def test_heartbeat_cadence_keeps_session_alive(self, service, clock, tmp_path):
        service.start_recording("T")
        for _ in range(9):  # 30 s of 3.333 s heartbeats
            clock.advance(3_333)
            assert service.keepalive() == (200, "ALIVE")
        assert not (tmp_path / "T.json").exists()

    def test_keepalive_without_session(self, service):
        assert service.keepalive() == (200, "NO_SESSION")

    def test_events_do_not_reset_watchdog(self, service, clock, tmp_path):
        service.start_recording("T")
        for _ in range(4):
            clock.advance(2_400)
            service.vertex_event("Page")
        clock.advance(500)  # 10.1 s since start, no keepalive
        assert (tmp_path / "T.json").exists()

    def test_expiry_with_empty_session_saves_empty_model(self, service, clock, tmp_path):
        service.start_recording("Idle")
        clock.advance(10_000)
        saved = json.loads((tmp_path / "Idle.json").read_text())
        assert saved["models"][0]["vertices"] == []
        assert saved["models"][0]["edges"] == []

    def test_expiry_storage_failure_still_finalizes(self, tmp_path, clock):
        svc = RecorderService(
            ServiceConfig(keep_alive_timeout_ms=10_000, out_dir=tmp_path / "nope"),
            timer_backend=clock,
        )
        svc.start_recording("T")
        clock.advance(10_000)
        assert svc.vertex_event("Home") == (409, "NO_SESSION")

    def test_shutdown_flushes_live_session(self, service, tmp_path):
        service.start_recording("T")
        service.vertex_event("Home")
        service.shutdown()
        assert (tmp_path / "T.json").exists()


# --- HTTP facade -------------------------------------------------------------


@pytest.fixture()
def http_server(service):
    server = build_http_server(service, host="127.0.0.1", port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


class TestHttpFacade:
    def test_startrec_plain_text_body(self, http_server):
        r = requests.post(f"{http_server}/startrec", data={"title": "PetClinic"})
        assert r.status_code == 200
        assert r.text == "STARTED"
        assert r.headers["Access-Control-Allow-Origin"] == "*"

    def test_startrec_multipart_form(self, http_server):
        # browsers posting FormData use multipart encoding
        r = requests.post(f"{http_server}/startrec", files={"title": (None, "PetClinic")})
        assert (r.status_code, r.text) == (200, "STARTED")

    def test_startrec_missing_title(self, http_server):
        assert requests.post(f"{http_server}/startrec").status_code == 400

    def test_event_flow_over_http(self, http_server, service, tmp_path):
        s = requests.Session()
        s.post(f"{http_server}/startrec", data={"title": "Run"})
        assert s.post(f"{http_server}/vertex", data={"name": "Welcome Page"}).text == "OK"
        assert s.post(f"{http_server}/edge", data={"name": "FINDOWNERS"}).text == "OK"
        assert s.post(f"{http_server}/vertex", data={"name": "Find Owners"}).text == "OK"
        assert s.post(f"{http_server}/keepalive").text == "ALIVE"
        assert s.post(f"{http_server}/stoprec").text == "STOPPED"
        saved = json.loads((tmp_path / "Run.json").read_text())
        assert [e["name"] for e in saved["models"][0]["edges"]] == ["e_FINDOWNERS"]

    def test_vertex_without_session_is_409(self, http_server):
        r = requests.post(f"{http_server}/vertex", data={"name": "Home"})
        assert (r.status_code, r.text) == (409, "NO_SESSION")

    def test_keepalive_idle_is_200(self, http_server):
        r = requests.post(f"{http_server}/keepalive")
        assert (r.status_code, r.text) == (200, "NO_SESSION")

    def test_stoprec_idle_is_409(self, http_server):
        assert requests.post(f"{http_server}/stoprec").status_code == 409

    def test_unknown_route(self, http_server):
        assert requests.post(f"{http_server}/nope").status_code == 404

    def test_options_preflight(self, http_server):
        r = requests.options(f"{http_server}/vertex")
        assert r.status_code == 204
        assert r.headers["Access-Control-Allow-Origin"] == "*"
        assert "POST" in r.headers["Access-Control-Allow-Methods"]

    def test_query_string_fallback(self, http_server):
        r = requests.post(f"{http_server}/startrec?title=QueryRun")
        assert (r.status_code, r.text) == (200, "STARTED")
