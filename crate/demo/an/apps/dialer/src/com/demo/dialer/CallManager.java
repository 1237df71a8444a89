package com.demo.dialer;

public class CallManager {
    private Telephony telephony;
    private CallLog log;

    public Call dial(String phone, int line) {
        Call call = telephony.open(line);
        call.connect(phone);
        log.record(phone, line, System.currentTimeMillis());
        return call;
    }

    public void hangup(String reason, int line) {
        Call active = telephony.active(line);
        if (active != null) {
            active.terminate(reason);
        }
        log.close(line, reason);
    }

    public Call redial(String number, int tries) {
        Call last = null;
        for (int n = 0; n < tries && (last == null || !last.isConnected()); n++) {
            last = dial(number, 0);
        }
        return last;
    }

    public void mute(boolean on, int line) {
        Call active = telephony.active(line);
        active.setMicrophoneEnabled(!on);
        log.note(line, on ? "muted" : "unmuted");
    }
}
