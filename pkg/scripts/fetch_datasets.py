"""Download the Gnutella and Powergrid networks into $LACENT_DATA_DIR (default ./data)."""
import io
import urllib.request
import zipfile

from lacentrality.datasets import data_dir

GNUTELLA_URL = "https://snap.stanford.edu/data/p2p-Gnutella08.txt.gz"
POWER_URL = "http://www-personal.umich.edu/~mejn/netdata/power.zip"


def main():
    root = data_dir()
    root.mkdir(parents=True, exist_ok=True)
    target = root / "p2p-Gnutella08.txt.gz"
    if not target.exists():
        print(f"fetching {GNUTELLA_URL}")
        urllib.request.urlretrieve(GNUTELLA_URL, target)
    if not (root / "power.gml").exists():
        print(f"fetching {POWER_URL}")
        with urllib.request.urlopen(POWER_URL) as resp:
            archive = zipfile.ZipFile(io.BytesIO(resp.read()))
        (root / "power.gml").write_bytes(archive.read("power.gml"))
    print(f"data in {root.resolve()}")


if __name__ == "__main__":
    main()
