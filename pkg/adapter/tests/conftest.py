import json

import pytest
from PIL import Image

# Ten solid-color images whose captions mention the dominant color, so
# color-name detections literally overlap the caption text.
SAMPLE = [
    ("img_red", (255, 0, 0), "a red ball resting on a wooden table"),
    ("img_green", (0, 255, 0), "a green field under a clear sky"),
    ("img_blue", (0, 0, 255), "a blue car parked by the curb"),
    ("img_yellow", (255, 255, 0), "a yellow umbrella left in the rain"),
    ("img_cyan", (0, 255, 255), "a cyan surfboard on the sand"),
    ("img_magenta", (255, 0, 255), "a magenta scarf draped over a chair"),
    ("img_orange", (255, 128, 0), "an orange cat sleeping on the porch"),
    ("img_white", (250, 250, 250), "a white plate with nothing on it"),
    ("img_black", (5, 5, 5), "a black dog waiting at the door"),
    ("img_gray", (128, 128, 128), "a gray wall behind the old bench"),
]


@pytest.fixture(scope="session")
def sample_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("sample")
    for image_id, rgb, _ in SAMPLE:
        Image.new("RGB", (32, 32), rgb).save(root / f"{image_id}.png")
    return root


@pytest.fixture(scope="session")
def sample_captions():
    return {image_id: [caption] for image_id, _, caption in SAMPLE}


@pytest.fixture(scope="session")
def captions_path(tmp_path_factory, sample_captions):
    path = tmp_path_factory.mktemp("caps") / "captions.json"
    path.write_text(json.dumps(sample_captions))
    return path
