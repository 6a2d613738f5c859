import numpy as np

from carchase.vision.detector import ColorBlobDetector
from carchase.vision.selector import SelectorMode, TargetSelector
from test_tracker import BG, blob_frame


def empty_frame():
    frame = np.zeros((120, 160, 3), dtype=np.uint8)
    frame[:, :] = BG
    return frame


def counting_detector():
    inner = ColorBlobDetector()
    calls = {"n": 0}

    def detector(frame):
        calls["n"] += 1
        return inner(frame)

    return detector, calls


def test_first_frame_switches_to_track():
    sel = TargetSelector()
    assert sel.mode is SelectorMode.DETECT
    box = sel.step(blob_frame(80, 60))
    assert box is not None
    assert sel.mode is SelectorMode.TRACK


def test_steady_tracking_never_redetects():
    detector, calls = counting_detector()
    sel = TargetSelector(detector=detector)
    sel.step(blob_frame(40, 60))
    for i in range(1, 30):
        box = sel.step(blob_frame(40 + 2 * i, 60))
        assert box is not None
    assert sel.mode is SelectorMode.TRACK
    assert calls["n"] == 1


def test_no_target_stays_in_detect():
    detector, calls = counting_detector()
    sel = TargetSelector(detector=detector)
    for _ in range(4):
        assert sel.step(empty_frame()) is None
    assert sel.mode is SelectorMode.DETECT
    assert calls["n"] == 4


def test_occlusion_reverts_to_detect_after_loss_frames():
    sel = TargetSelector(loss_frames=3)
    sel.step(blob_frame(80, 60))
    sel.step(blob_frame(80, 60))
    modes = []
    for _ in range(5):
        out = sel.step(empty_frame())
        assert out is None
        modes.append(sel.mode)
    # still tracking through the first two missed frames, detect from the third
    assert modes[0] is SelectorMode.TRACK
    assert modes[1] is SelectorMode.TRACK
    assert modes[2] is SelectorMode.DETECT
    assert modes[4] is SelectorMode.DETECT


def test_reacquires_after_loss():
    sel = TargetSelector()
    sel.step(blob_frame(80, 60))
    for _ in range(3):
        sel.step(empty_frame())
    assert sel.mode is SelectorMode.DETECT
    box = sel.step(blob_frame(50, 40))
    assert box is not None
    assert sel.mode is SelectorMode.TRACK
    assert abs(box.u - 50.0) <= 1.0


def test_brief_occlusion_keeps_tracking():
    sel = TargetSelector(loss_frames=3)
    sel.step(blob_frame(80, 60))
    sel.step(empty_frame())
    sel.step(empty_frame())
    box = sel.step(blob_frame(80, 60))
    assert sel.mode is SelectorMode.TRACK
    assert box is not None
