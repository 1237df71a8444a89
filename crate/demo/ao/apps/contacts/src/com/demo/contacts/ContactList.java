package com.demo.contacts;

import java.util.Collections;
import java.util.List;
import java.util.Map;

public class ContactList {
    private List<Contact> contacts;
    private Map<String, Contact> byNumber;
    private ChangeListener listener;

    void mergeContacts() {
        for (Contact c : contacts) {
            Contact other = byNumber.get(c.primaryNumber());
            if (other != null && other != c) {
                c.absorb(other);
            }
        }
    }

    public void refreshAll(ContactProvider provider) {
        contacts = provider.loadContacts();
        byNumber.clear();
        mergeContacts();
        Collections.sort(contacts);
    }

    public void sortContacts(boolean byLastName) {
        Comparator<Contact> order = byLastName ? Contact.LAST_NAME : Contact.FIRST_NAME;
        Collections.sort(contacts, order);
        listener.onReordered(contacts.size());
        Stats.increment("contacts.sorted");
    }

    public Contact lookup(String number) {
        String normalized = PhoneNumbers.normalize(number);
        Contact hit = byNumber.get(normalized);
        Stats.increment("contacts.lookup");
        return hit;
    }

    void notifyChanged() {
        listener.onChanged(contacts.size());
        Stats.increment("contacts.changed");
        Backup.schedule(contacts);
    }

    public void saveAll(ContactProvider provider) {
        provider.storeContacts(contacts);
        notifyChanged();
    }
}
