package com.demo.calendar;

import java.util.ArrayList;
import java.util.List;

public class EventStore {
    private final List<String> events = new ArrayList<>();
    private int revision;

    public void addEvent(String title, long start) {
        String entry = title + "@" + start;
        events.add(entry);
        revision = revision + 1;
        Log.d("calendar", "added " + entry);
    }

    public boolean removeEvent(String title) {
        for (int i = 0; i < events.size(); i++) {
            if (events.get(i).startsWith(title + "@")) {
                events.remove(i);
                return true;
            }
        }
        return false;
    }

    public void syncEvents(CalendarServer server) {
        List<String> remote = server.fetchAll(revision);
        for (String r : remote) {
            if (!events.contains(r)) {
                events.add(r);
            }
        }
        revision = server.currentRevision();
    }

    public String exportEvents(char separator) {
        StringBuilder sb = new StringBuilder();
        for (String e : events) {
            sb.append(e).append(separator);
        }
        return sb.toString();
    }

    public String formatEvent(int index) {
        String raw = events.get(index);
        int at = raw.indexOf('@');
        return raw.substring(0, at) + " starting " + raw.substring(at + 1);
    }
}
