#!/usr/bin/env python3
"""Generate the synthetic part of the 32-app reference corpus.

The four hand-written apps (Kasa, LIFX, WeMo, e-Control) already live in the
output directory; this adds 28 more whose features are chosen so the whole
set has the published distribution. Output is deterministic.

usage: gen_reference_corpus.py [OUT_DIR]   (default: tests/fixtures/corpus)
"""

import random
import shutil
import sys
from dataclasses import dataclass
from pathlib import Path

HANDWRITTEN = {
    # name: (key, local, broadcast, insecure)
    "Kasa": ("HK", True, True, False),
    "LIFX": ("NE", True, True, False),
    "WeMo": ("NE", True, False, True),
    "e-Control": ("NE", True, True, False),
}

TARGET = dict(total=32, NE=10, HK=6, OK=16, local=18, broadcast=15, insecure=6)


@dataclass
class Profile:
    vendor: str
    device: str
    key: str           # NE | HK_CUSTOM | HK_SPEC | HK_STR | OK_KS | OK_GEN
    transport: str     # udp | tcp | https | http
    broadcast: str = ""  # "" | limited | directed
    insecure: str = ""   # "" | SIP | MQTT | UPnP

    @property
    def verdict(self):
        return self.key.split("_")[0]

    @property
    def local(self):
        return self.transport in ("udp", "tcp")


PROFILES = [
    # no encryption
    Profile("voltix", "plug", "NE", "udp", "limited"),
    Profile("lumora", "bulb", "NE", "udp", "directed"),
    Profile("irwave", "remote", "NE", "udp", "limited"),
    Profile("glowlab", "strip", "NE", "udp", "limited"),
    Profile("aerio", "fan", "NE", "udp", "limited"),
    Profile("camly", "camera", "NE", "tcp"),
    Profile("sensa", "sensor", "NE", "https", insecure="MQTT"),
    # hardcoded keys
    Profile("plugtec", "switch", "HK_CUSTOM", "udp", "limited"),
    Profile("brightco", "bulb", "HK_SPEC", "udp", "directed"),
    Profile("homebee", "hub", "HK_STR", "udp", "limited"),
    Profile("vistacam", "camera", "HK_SPEC", "tcp", insecure="UPnP"),
    Profile("ringo", "doorbell", "HK_STR", "https", insecure="SIP"),
    # keyed, key not in the app
    Profile("keystone", "lock", "OK_KS", "udp", "limited"),
    Profile("thermi", "thermostat", "OK_GEN", "udp", "limited"),
    Profile("aquaflow", "sprinkler", "OK_KS", "udp", "limited"),
    Profile("luxo", "bulb", "OK_GEN", "udp", "directed"),
    Profile("cleanbot", "vacuum", "OK_KS", "https", insecure="MQTT"),
    Profile("talkbox", "intercom", "OK_GEN", "https", insecure="SIP"),
    Profile("safehaus", "alarm", "OK_KS", "https"),
    Profile("petcam", "feeder", "OK_GEN", "https"),
    Profile("airpure", "purifier", "OK_KS", "https"),
    Profile("chillr", "aircon", "OK_GEN", "https"),
    Profile("garagio", "opener", "OK_KS", "https"),
    Profile("brewly", "kettle", "OK_GEN", "https"),
    Profile("sonora", "speaker", "OK_KS", "https"),
    Profile("weightr", "scale", "OK_GEN", "https"),
    Profile("blindz", "shade", "OK_KS", "https"),
    Profile("meterly", "energy", "OK_GEN", "https"),
]


def app_name(i, p):
    return f"ref{i:02d}-{p.vendor}-{p.device}"


def method(name, arity, body, ui=False):
    head = "# @ui\n" if ui else ""
    lines = "\n".join("  " + b for b in body)
    return f"{head}.method {name}({arity})\n{lines}\n.end method\n"


def hexbytes(rng, n):
    return "".join(f"{rng.randrange(256):02x}" for _ in range(n))


def ui_file(pkg, p):
    body = [
        ".class " + pkg + ".ui.MainActivity",
        ".super android.app.Activity",
        "",
        method("onCreate", 1, [
            "invoke android.app.Activity setContentView 1",
            f"invoke {pkg}.net.DeviceController discover 0",
            "return",
        ]),
        method("onClick", 1, [
            "invoke android.view.View getId 0",
            "const-int r1 1",
            f"invoke {pkg}.net.DeviceController sendCommand 2",
            "return",
        ]),
    ]
    return "\n".join(body)


def crypto_file(pkg, p, rng):
    cls = f".class {pkg}.crypto.PayloadCipher\n\n"
    if p.key == "HK_CUSTOM":
        # rolling xor over the payload; the key byte is baked in
        return cls + method("scramble", 1, [
            f"const-int r1 {rng.randrange(17, 250)}",
            "other array-length",
            "const-int r2 0",
            "other aget-byte",
            "xor r3 r3 r1",
            "and r3 r3 r4",
            "shl r5 r1 r6",
            "or r1 r5 r3",
            "other aput-byte",
            "add r2 r2 r7",
            "other if-lt",
            "return",
        ])
    if p.key == "HK_SPEC":
        return cls + method("seal", 1, [
            f"const-bytes r0 {hexbytes(rng, 16)}",
            'const-string r1 "AES"',
            "new-instance javax.crypto.spec.SecretKeySpec",
            "invoke javax.crypto.spec.SecretKeySpec <init> 2",
            'const-string r0 "AES/ECB/PKCS5Padding"',
            "invoke javax.crypto.Cipher getInstance 1",
            "invoke javax.crypto.Cipher doFinal 1",
            "return",
        ])
    if p.key == "HK_STR":
        key = "".join(rng.choice("abcdefghjkmnpqrstuvwxyz23456789") for _ in range(16))
        return cls + method("seal", 1, [
            f'const-string r0 "{key}"',
            "invoke java.lang.String getBytes 0",
            'const-string r1 "AES"',
            "new-instance javax.crypto.spec.SecretKeySpec",
            "invoke javax.crypto.spec.SecretKeySpec <init> 2",
            "invoke javax.crypto.Cipher doFinal 1",
            "return",
        ])
    if p.key == "OK_KS":
        return cls + method("seal", 1, [
            'const-string r0 "AndroidKeyStore"',
            "invoke java.security.KeyStore getInstance 1",
            "invoke java.security.KeyStore getKey 2",
            'const-string r0 "AES/GCM/NoPadding"',
            "invoke javax.crypto.Cipher getInstance 1",
            "invoke javax.crypto.Cipher init 2",
            "invoke javax.crypto.Cipher doFinal 1",
            "return",
        ])
    if p.key == "OK_GEN":
        return cls + method("seal", 1, [
            'const-string r0 "AES"',
            "invoke javax.crypto.KeyGenerator getInstance 1",
            "invoke javax.crypto.KeyGenerator generateKey 0",
            "invoke javax.crypto.Cipher init 2",
            "invoke javax.crypto.Cipher doFinal 1",
            "return",
        ])
    return None


def transport_body(p, rng):
    if p.transport == "udp":
        host = f"192.168.{rng.randrange(0, 5)}.{rng.randrange(2, 250)}"
        return [
            f'const-string r1 "{host}"',
            "invoke java.net.InetAddress getByName 1",
            f"const-int r2 {rng.choice([5000, 6668, 8899, 9123, 38899])}",
            "new-instance java.net.DatagramPacket",
            "invoke java.net.DatagramPacket <init> 4",
            "invoke java.net.DatagramSocket send 1",
            "return",
        ]
    if p.transport == "tcp":
        return [
            "new-instance java.net.Socket",
            "invoke java.net.Socket <init> 2",
            "invoke java.net.Socket getOutputStream 0",
            "invoke java.io.OutputStream write 1",
            "return",
        ]
    scheme, owner = ("https", "javax.net.ssl.HttpsURLConnection") if p.transport == "https" else (
        "http", "java.net.HttpURLConnection")
    return [
        f'const-string r1 "{scheme}://api.{p.vendor}-cloud.com/v2/devices"',
        "new-instance java.net.URL",
        "invoke java.net.URL <init> 1",
        "invoke java.net.URL openConnection 0",
        f"invoke {owner} connect 0",
        "return",
    ]


def net_file(pkg, p, rng, sealed):
    out = [f".class {pkg}.net.DeviceController", ""]
    send = ["other iget-object"]
    if sealed:
        send += ["move r0 r1", f"invoke {pkg}.crypto.PayloadCipher {sealed} 1"]
    send += ["move r0 r1", f"invoke {pkg}.net.Transport send 1", "return"]
    out.append(method("sendCommand", 2, send))

    disc = []
    if p.broadcast:
        addr = "255.255.255.255" if p.broadcast == "limited" else f"192.168.{rng.randrange(0, 5)}.255"
        disc = [
            f'const-string r1 "{addr}"',
            "invoke java.net.InetAddress getByName 1",
            "new-instance java.net.DatagramSocket",
            "invoke java.net.DatagramSocket setBroadcast 1",
            "invoke java.net.DatagramSocket send 1",
            "return",
        ]
    else:
        disc = ["invoke android.os.Handler post 1", "return"]
    out.append(method("discover", 0, disc))

    out += ["", f".class {pkg}.net.Transport", ""]
    out.append(method("send", 1, transport_body(p, rng)))

    if p.insecure == "MQTT":
        out += ["", f".class {pkg}.net.Telemetry", ""]
        out.append(method("publish", 1, [
            "new-instance org.eclipse.paho.client.mqttv3.MqttClient",
            "invoke org.eclipse.paho.client.mqttv3.MqttClient <init> 2",
            "invoke org.eclipse.paho.client.mqttv3.MqttClient connect 0",
            "invoke org.eclipse.paho.client.mqttv3.MqttClient publish 2",
            "return",
        ]))
    elif p.insecure == "SIP":
        out += ["", f".class {pkg}.net.CallSession", ""]
        out.append(method("open", 1, [
            "invoke android.net.sip.SipManager newInstance 1",
            "new-instance android.net.sip.SipProfile$Builder",
            "invoke android.net.sip.SipManager makeAudioCall 5",
            "return",
        ]))
    elif p.insecure == "UPnP":
        out += ["", f".class {pkg}.net.UpnpDescriptor", ""]
        out.append(method("<clinit>", 0, [
            'const-string r0 "urn:schemas-upnp-org:device:MediaServer:1"',
            'const-string r1 "urn:schemas-upnp-org:service:ContentDirectory:1"',
            "return",
        ]))
    return "\n".join(out)


def sealed_method(p):
    if p.key == "NE":
        return None
    return "scramble" if p.key == "HK_CUSTOM" else "seal"


def check_distribution():
    rows = list(HANDWRITTEN.values())
    rows += [(p.verdict, p.local, bool(p.broadcast), bool(p.insecure)) for p in PROFILES]
    got = dict(
        total=len(rows),
        NE=sum(r[0] == "NE" for r in rows),
        HK=sum(r[0] == "HK" for r in rows),
        OK=sum(r[0] == "OK" for r in rows),
        local=sum(r[1] for r in rows),
        broadcast=sum(r[2] for r in rows),
        insecure=sum(r[3] for r in rows),
    )
    assert got == TARGET, got
    # broadcasting needs a local datagram socket
    assert all(p.local for p in PROFILES if p.broadcast)


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/corpus")
    check_distribution()
    rng = random.Random(0x10C0)
    for i, p in enumerate(PROFILES, start=1):
        d = out / app_name(i, p)
        if d.exists():
            shutil.rmtree(d)
        d.mkdir(parents=True)
        pkg = f"com.{p.vendor}.{p.device}"
        (d / "ui.smir").write_text(ui_file(pkg, p))
        sealed = sealed_method(p)
        (d / "net.smir").write_text(net_file(pkg, p, rng, sealed))
        c = crypto_file(pkg, p, rng)
        if c:
            (d / "crypto.smir").write_text(c)
    print(f"wrote {len(PROFILES)} apps to {out}")


if __name__ == "__main__":
    main()
